"""Reference values frozen from tests/oracles.py (mpmath, 30 digits).

test_oracles.py recomputes each one, so a drift in the oracle is caught.
"""

import math

MOMENTS = {
    ("indicator", 1, False): 2.0 / 3.0,
    ("indicator", 3, False): 0.4,
    ("indicator", 2, True): 0.5,
    ("exponential", 1, False): 2.0,
    ("exponential", 3, False): 12.0,
    ("exponential", 2, True): 4.0,
    ("sine", 1, False): 0.63661977236758134307553505349,
}
POWER_MINUS_1_5_A1 = 4.0
POWER_MINUS_1_5_A3 = 0.8

# (kernel, k_alpha, eps, xi) -> i alpha_hat_eps(xi)
SPECTRA = {
    ("exponential", None, 0.1, 1.0): 4.50477243368388613868310199834,
    ("exponential", None, 1.0, 0.37): 0.362986016967249271747415081407,
    ("power", -1.5, 1.0, 0.3): 1.68250083601696496367416971987,
    ("power", -1.5, 1.0, 1.7): 4.1160256933081792490059905093,
    ("power", -1.5, 1.0, 12.5): 11.1135696827604889913943566726,
    ("power", -1.5, 0.1, 7.3): 27.2350820636408314962454962891,
    ("sine", None, 1.0, 0.75): 0.8,
    ("indicator", None, 0.5, 2.2): -0.628493477839770782780263776101,
}

FAR_FIELD_CONSTANT = {-1.5: 3.06778662723296926303176527312, -0.5: 0.515123517545547363292951223937}

# (kernel, k_alpha, eps, function, t) -> D u(t)
APPLY = {
    ("power", -1.5, 0.3, "gaussian", 0.7): -0.84743879404834621791872124518,
    ("exponential", None, 0.2, "gaussian", 0.4): -0.571277818212190074273343289644,
    ("indicator", None, 0.5, "sqrt-abs", 1.0): 0.51020514165242620940399376907,
    ("indicator", None, 1.0, "sqrt-abs", 0.3): 0.289792811888688012837164070911,
}

# max_t t/(1+t^2)^2, attained at 1/sqrt(3)
RUNGE_DEFECT_MAX = 0.324759526419164492536396189032
RUNGE_DEFECT_ARGMAX = 1.0 / math.sqrt(3.0)

# int exp(-2 t^2) over [-8, 8]
GAUSSIAN_SELF_PAIRING = 1.25331413731550025120788264241

# power-kernel exponent where 2 pi b - C/(4b) changes sign (b = 1)
POSITIVITY_THRESHOLD_K = 1.10109219346086088057297392695

"""
Constants frozen from residual-oracle adjudication runs.

`python accelwave.py adjudicate` re-runs both ladders and reports whether the
selected values still agree with the ones below; tests/oracle/test_adjudication.py
pins them.
"""

# mu = DARK_SOLITON_MU_SIGN * sigma^2 zeroes the G^2 residual for psi = tanh(sigma q)
DARK_SOLITON_MU_SIGN = 1.0
# the competing candidate that leaves an O(sigma^2) residual
DARK_SOLITON_MU_SIGN_REJECTED = -1.0

# constant-intensity waves under V_R -> V_R + sigma_nl |Psi|^p use mu + c_shift * sigma_nl
NONLINEAR_SHIFT_COEFFICIENT = 1.0
NONLINEAR_SHIFT_CANDIDATES = (1.0, 2.0)

# |psi| below which G'/(2 psi^2) is flagged rather than evaluated
PSI_FLOOR = 1e-8

# relative tolerance for treating mu as the inverted-harmonic threshold a^2 / (4 V0^2)
THRESHOLD_RTOL = 1e-12

"""Double-resolution solver values (K=512, N=2048). Regenerate with tests/oracles/regression.py."""

LAMBDA_ALPHA2_M3 = 2.23775067465115
GAMMA_ALPHA2_M3 = 5.007528081901678
LAMBDA_ALPHA3_M3 = 2.515863870860778
GAMMA_ALPHA3_M3 = 3.990531172534496
LAMBDA_DEGREGORIO_ALPHA2 = 1.4008873676548557
GAMMA_DEGREGORIO_ALPHA2 = 1.9624854168549508

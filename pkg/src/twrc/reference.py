"""Published reference values for the default scenario (20 dB, omega = (0.5, 2), pR = P).

Used by ``reproduce-paper`` to print a comparison report. Tolerances are
absolute unless a ``rel`` entry is given.
"""

DECISIVE_SUM_RATE = (0.83, 0.02)

# sum rate -> ((r1, r2), bottleneck exponent)
EXACT_ALLOCATION = {
    0.148: ((0.0, 0.148), 1.37),
    0.4: ((0.126, 0.274), 1.12),
    0.5: ((0.176, 0.324), 1.0243),
    0.8: ((0.326, 0.474), 0.73),
    1.0: ((0.425, 0.575), 0.5307),
    1.2: ((0.520, 0.680), 0.37),
    1.5: ((0.664, 0.836), 0.1995),
    1.6: ((0.710, 0.890), 0.15),
    2.0: ((0.910, 1.090), 0.04),
    2.4: ((1.103, 1.297), 1.8e-4),
}
QUASI_ALLOCATION = {
    1.0: ((0.426, 0.574), 0.5286),
    1.2: ((0.526, 0.674), 0.366),
    1.5: ((0.676, 0.824), 0.1881),
    1.6: ((0.726, 0.874), 0.1449),
    2.0: ((0.926, 1.074), 0.0316),
    2.431: ((1.118, 1.282), 0.0),
}
PAIR_TOL = 0.01
EXPONENT_TOL = 0.02
NEAR_ZERO_REL = 0.5
ZERO_EXPONENT_MAX = 0.01

# R2 -> smallest R1 at which link 1 is the bottleneck
PLATEAU_EDGES = {0.0: 0.0, 0.2: 0.16, 0.5: 0.36, 0.7: 0.54, 1.1: 0.92}

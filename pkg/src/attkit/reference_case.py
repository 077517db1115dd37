"""Bundled reference determination case with known-good results.

Seven clustered unit directions, as seen by a narrow field-of-view optical
sensor, measured in the body frame with roughly 0.002 rad of noise. The
known-good estimate below was produced by the closed-form solver on these
exact inputs; all values are rounded to four decimals, which by itself
perturbs the recomputed solution at the 1e-3 level. The comparison
tolerance accounts for that rounding.
"""

import numpy as np

REFS = np.array(
    [
        [0.3817, 0.3077, 0.2324, 0.3374, 0.3161, 0.2975, 0.2807],
        [-0.5450, -0.6045, -0.5824, -0.5675, -0.6582, -0.6046, -0.5912],
        [0.7465, 0.7347, 0.7789, 0.7511, 0.6832, 0.7389, 0.7561],
    ]
)

BODY_MEAS = np.array(
    [
        [0.1287, 0.0975, 0.1580, 0.1264, 0.0210, 0.1020, 0.1249],
        [-0.9628, -0.9843, -0.9833, -0.9750, -0.9904, -0.9829, -0.9836],
        [-0.2394, -0.1517, -0.0862, -0.1904, -0.1414, -0.1404, -0.1279],
    ]
)

ATTITUDE_TRUE = np.array(
    [
        [-0.2029, -0.1865, -0.9613],
        [0.6385, 0.7191, -0.2743],
        [0.7424, -0.6694, -0.0269],
    ]
)

ATTITUDE_EST = np.array(
    [
        [-0.2042, -0.1856, -0.9612],
        [0.6386, 0.7190, -0.2745],
        [0.7420, -0.6698, -0.0283],
    ]
)

ERROR_MATRIX = np.array(
    [
        [-0.0000, 0.0006, 0.0012],
        [-0.0006, -0.0000, -0.0008],
        [-0.0012, 0.0008, -0.0000],
    ]
)

RESIDUALS = np.array(
    [
        [-0.0009, -0.0008, -0.0006, -0.0007, 0.0007, 0.0009, 0.0008],
        [-0.0007, -0.0008, -0.0000, 0.0005, 0.0003, 0.0009, 0.0009],
        [-0.0007, -0.0012, 0.0006, -0.0012, 0.0016, -0.0016, 0.0011],
    ]
)

# Entrywise agreement required of a recomputed solution, derived from the
# 4-decimal rounding of the stored inputs.
TOLERANCE = 2e-3

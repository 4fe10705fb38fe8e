"""Reference run configurations and the block sizes they are known to produce."""

P0_CONFIG = {
    "system": {
        "name": "P0",
        "stages": [1, 2, 3],
        "extension": "zero",
        "lambda_bar": 2,
        "n_max": 3,
    },
    "depth": 2,
    "a": 2,
    "seed": 0,
}

AFFINE_CONFIG = {
    "system": {
        "name": "affine-half",
        "stages": [1, 2, 3],
        "extension": "affine",
        "coefficient": "1/2",
        "lambda_bar": 2,
        "n_max": 3,
    },
    "depth": 2,
    "a": 2,
    "seed": 0,
}

# One explicit step per stage transition; the second row mixes both old coordinates.
EXPLICIT_CONFIG = {
    "system": {
        "name": "explicit-mixing",
        "stages": [1, 2, 3],
        "extension": [{1: ["0"]}, {2: ["1/2", "1/2"]}],
        "lambda_bar": 2,
        "n_max": 3,
    },
    "depth": 2,
    "a": 2,
    "seed": 0,
}

P0_CARDINALITIES = {
    "#M_1": 5,
    "#C_1": 4,
    "#D_1": 9,
    "#M_2": 81,
    "#C_2": 208,
    "#D_2": 289,
}

P0_BOUNDARIES = {
    "#M_1": 5,
    "#D_1": 9,
    "#M_2": 81,
}

REFERENCE_SYSTEMS = {
    "P0": P0_CONFIG,
    "affine": AFFINE_CONFIG,
    "explicit": EXPLICIT_CONFIG,
}

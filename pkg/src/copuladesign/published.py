"""Published reference numbers that the ``repro`` targets compare against.

Losses are percentages of D-efficiency. ``None`` marks a cell published as
not defined (tau outside the family's attainable range).
"""

# Linear two-response example on [0, 1] under independence.
FEDOROV_POINTS = (0.0, 0.38, 0.76, 1.0)
FEDOROV_WEIGHTS = (0.16, 0.28, 0.23, 0.33)

# Gaussian-copula parameters checked for invariance of the linear design.
COROLLARY_ALPHAS = (0.0, 0.3, 0.7)

# Binary logistic example on [0, 10], dependence ignored (4 parameters).
# The first support point is published as "> 0" and stored as 0.
BINARY_POINTS = (0.0, 2.80, 6.79)
BINARY_WEIGHTS = (0.42, 0.36, 0.22)

# Ignorance losses for the linear example: (family, tau) -> (alpha, loss).
IGNORANCE_LINEAR = {
    ("fgm", -0.15): (-0.67, 17.37),
    ("fgm", -0.10): (-0.45, 0.23),
    ("fgm", -0.05): (-0.22, 0.59),
    ("fgm", 0.05): (0.22, 0.68),
    ("fgm", 0.10): (0.45, 0.39),
    ("fgm", 0.15): (0.67, 10.18),
    ("clayton", -0.15): (None, None),
    ("clayton", -0.10): (None, None),
    ("clayton", -0.05): (None, None),
    ("clayton", 0.05): (0.10, 0.16),
    ("clayton", 0.10): (0.22, 0.13),
    ("clayton", 0.15): (0.35, 0.34),
    ("clayton", 0.35): (1.08, 0.11),
    ("clayton", 0.75): (6.00, 0.27),
    ("frank", -0.15): (-1.37, 0.10),
    ("frank", -0.10): (-0.90, 0.10),
    ("frank", -0.05): (-0.45, 0.10),
    ("frank", 0.05): (0.45, 0.10),
    ("frank", 0.10): (0.90, 0.10),
    ("frank", 0.15): (1.37, 0.10),
    ("frank", 0.35): (3.51, 0.11),
    ("frank", 0.75): (14.13, 0.16),
}

# Cells whose published values are far out of line with their neighbours;
# computed and reported but not scored.
IGNORANCE_LINEAR_FLAGGED = {("fgm", -0.15), ("fgm", 0.15)}

# Ignorance losses for the binary example: (family, tau) -> (alpha, loss).
IGNORANCE_BINARY = {
    ("frank", 0.11): (1.00, 1.72),
    ("frank", 0.45): (5.00, 1.31),
    ("frank", 0.66): (10.00, 1.87),
    ("frank", 0.76): (15.00, 2.89),
    ("frank", 0.82): (20.00, 3.10),
    ("clayton", 0.11): (0.24, 1.75),
    ("clayton", 0.45): (1.68, 1.49),
    ("clayton", 0.66): (3.98, 0.71),
    ("clayton", 0.76): (6.42, 2.84),
    ("clayton", 0.82): (8.89, 9.48),
    ("gumbel", 0.11): (1.12, 0.95),
    ("gumbel", 0.45): (1.84, 1.29),
    ("gumbel", 0.66): (3.00, 2.31),
    ("gumbel", 0.76): (4.21, 2.99),
    ("gumbel", 0.82): (5.45, 3.25),
}

BINARY_TAUS = (0.11, 0.45, 0.66, 0.76, 0.82)

# Row used for the dependence-ignoring benchmark check (strongest dependence,
# also the one shown as the representative sensitivity plot).
BINARY_BENCHMARK_TAU = 0.82

# Misspecification losses (true family, assumed family, tau) -> loss.
MISSPECIFICATION_BINARY = {
    ("frank", "clayton"): (2.24, 0.26, 1.09, 4.27, 8.24),
    ("frank", "gumbel"): (0.67, 0.03, 0.11, 0.02, 0.01),
    ("clayton", "frank"): (1.99, 0.26, 1.04, 3.87, 10.91),
    ("clayton", "gumbel"): (2.70, 0.11, 1.28, 4.08, 10.96),
    ("gumbel", "frank"): (0.82, 0.03, 0.14, 0.01, 0.01),
    ("gumbel", "clayton"): (2.75, 0.15, 1.57, 4.73, 8.43),
}


def binary_alphas() -> dict:
    """``(family, tau) -> alpha`` as published for the binary example."""
    return {key: alpha for key, (alpha, _) in IGNORANCE_BINARY.items()}

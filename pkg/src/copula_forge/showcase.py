"""Reference parameter sets, one per cataloged family and dimension.

Keys are short labels; values are ``(family, params, d)`` triples suitable
for :func:`~copula_forge.core.validate_params`.
"""

TRIVARIATE_ASYM_LOGISTIC = {
    "subsets": [[0], [1], [2], [0, 1], [0, 2], [1, 2], [0, 1, 2]],
    "theta": [1.0, 1.0, 1.0, 0.6, 0.5, 0.8, 0.3],
    "psi": [[0.4], [0.1], [0.6], [0.3, 0.2], [0.1, 0.1], [0.4, 0.1], [0.2, 0.3, 0.2]],
}

SHOWCASE = {
    # bivariate Archimedean
    "clayton": ("clayton", {"theta": 1.0}, 2),
    "amh": ("amh", {"theta": -0.5}, 2),
    "frank": ("frank", {"theta": -8.0}, 2),
    "joe": ("joe", {"theta": 2.0}, 2),
    "nelsen9": ("nelsen9", {"theta": 1.0}, 2),
    "nelsen10": ("nelsen10", {"theta": 1.0}, 2),
    "nelsen11": ("nelsen11", {"theta": 0.5}, 2),
    "nelsen12": ("nelsen12", {"theta": 1.5}, 2),
    "nelsen13": ("nelsen13", {"theta": 2.0}, 2),
    "nelsen14": ("nelsen14", {"theta": 5.0}, 2),
    "nelsen15": ("nelsen15", {"theta": 1.5}, 2),
    "nelsen22": ("nelsen22", {"theta": 0.5}, 2),
    # multivariate Archimedean
    "clayton_mv": ("clayton", {"theta": 5.0}, 3),
    "amh_mv": ("amh", {"theta": 0.5}, 3),
    "frank_mv": ("frank", {"theta": 8.0}, 3),
    "joe_mv": ("joe", {"theta": 2.0}, 3),
    # bivariate extreme value
    "logistic": ("logistic", {"theta": 0.5}, 2),
    "galambos": ("galambos", {"theta": 1.5}, 2),
    "asym_logistic": ("asym_logistic", {"theta": 1.5, "psi1": 0.1, "psi2": 1.0}, 2),
    "asym_neg_logistic": ("asym_neg_logistic", {"theta": 10.0, "psi1": 0.5, "psi2": 1.0}, 2),
    "asym_mixed": ("asym_mixed", {"theta": 4.0 / 3.0, "psi1": -1.0 / 3.0}, 2),
    "husler_reiss": ("husler_reiss", {"theta": 1.0}, 2),
    "t_ev": ("t_ev", {"theta": 0.8, "psi1": 0.2}, 2),
    "bilogistic": ("bilogistic", {"alpha": 0.3, "beta": 0.7}, 2),
    # multivariate extreme value
    "logistic_mv": ("logistic", {"theta": 0.5}, 3),
    "asym_logistic_mv": ("asym_logistic_mv", TRIVARIATE_ASYM_LOGISTIC, 3),
    "dirichlet": ("dirichlet", {"theta": [1 / 3, 1 / 3, 1 / 3],
                                "sigma": [[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]}, 3),
    "husler_reiss_mv": ("husler_reiss_mv", {"gamma": [[0.0, 3.0, 3.0], [3.0, 0.0, 3.0], [3.0, 3.0, 0.0]]}, 3),
    # elliptical
    "gaussian": ("gaussian", {"rho": 0.71}, 2),
    "student": ("student", {"rho": 0.71, "theta": 4.0}, 2),
    "gaussian_mv": ("gaussian", {"rho": 0.71}, 3),
    "student_mv": ("student", {"rho": 0.71, "theta": 4.0}, 3),
}

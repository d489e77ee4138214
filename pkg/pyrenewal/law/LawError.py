class LawError(ValueError):
    """ Joint law of (tau, x) is malformed or unusable for the requested operation """

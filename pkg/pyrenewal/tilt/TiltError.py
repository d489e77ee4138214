class TiltError(RuntimeError):
    """ Tilting equation or drift equation cannot be solved for the given law """

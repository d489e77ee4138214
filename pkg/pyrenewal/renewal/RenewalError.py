class RenewalError(ValueError):
    """ Renewal computation requested on an unsuitable law or grid """

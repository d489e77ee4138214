class MgfError(ValueError):
    """ Moment generating function requested on a non-lattice law or an oversized grid """

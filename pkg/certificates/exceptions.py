class CertificateError(ValueError):
    """Malformed value certificate: wrong players, grid index out of range or κ not matching eps."""

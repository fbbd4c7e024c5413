"""
Custom exception classes for the fraclt package.
These exceptions separate bad inputs from numerical breakdowns so that the
command line front end can map them onto distinct exit statuses.
"""

class FracltError(Exception):
    """Base exception for all fraclt errors"""
    pass

class ValidationError(FracltError):
    """Raised when an input or precondition check fails"""
    pass

class DomainError(ValidationError):
    """Raised when a parameter lies outside its mathematical domain"""
    pass

class ConfigurationError(FracltError):
    """Raised when an experiment configuration is malformed or inconsistent"""
    pass

class SamplerError(FracltError):
    """Raised when a sampler cannot produce a path"""
    pass

class FactorizationError(SamplerError):
    """Raised when the Cholesky factorization fails after PSD repair"""
    pass

class EmbeddingError(SamplerError):
    """Raised when a circulant embedding has negative eigenvalues beyond tolerance"""
    pass

class NumericalError(FracltError):
    """Raised when a covariance repair or a quadrature breaks down"""
    pass

class ProcessingError(FracltError):
    """Raised when writing or serializing artifacts fails"""
    pass

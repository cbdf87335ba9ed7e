"""Face-level gender/age representation analytics for video and image media."""

__version__ = "0.1.0"

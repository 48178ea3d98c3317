"""Well-log gap census and gap-filling regression benchmark."""

__version__ = "0.1.0"

"""stratmoi: moment-of-instability checks for internal solitary waves in a stratified channel."""

__version__ = "0.1.0"

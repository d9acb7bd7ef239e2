"""genreforge: music genre classification from raw WAV audio."""

__version__ = "0.1.0"

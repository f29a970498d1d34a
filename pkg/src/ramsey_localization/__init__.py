"""Atomic position localization by dual measurement in a Ramsey interferometer."""
import importlib.metadata

try:
    __version__ = importlib.metadata.version('ramsey-localization')
except importlib.metadata.PackageNotFoundError:
    __version__ = '0.1.0'

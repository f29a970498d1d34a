"""Tests for package metadata."""
import os
import re

import ramsey_localization

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def test_version_fallback_matches_setup():
    with open(os.path.join(ROOT, 'setup.py')) as setup_file:
        fallback = re.search(
            r"'fallback_version': '([^']+)'", setup_file.read()).group(1)
    assert re.fullmatch(r'\d+\.\d+\.\d+.*', ramsey_localization.__version__)
    with open(os.path.join(ROOT, 'src', 'ramsey_localization',
                           '__init__.py')) as init_file:
        assert f"__version__ = '{fallback}'" in init_file.read()

"""setup.py module for ramsey_localization module."""
from setuptools import setup

setup(
    name='ramsey-localization',
    description=(
        'Atomic position localization by dual field-quadrature and '
        'internal-state measurement in a Ramsey interferometer.'),
    packages=[
        'ramsey_localization',
    ],
    package_dir={
        'ramsey_localization': 'src/ramsey_localization'
    },

    use_scm_version={
        'version_scheme': 'post-release',
        'local_scheme': 'node-and-date',
        'fallback_version': '0.1.0'},
    setup_requires=['setuptools_scm'],
    install_requires=[
        'numpy',
        'scipy',
        'pandas',
        'taskgraph>=0.6.1',
    ],
    extras_require={'test': ['pytest']},
    python_requires='>=3.8',
    include_package_data=True,
    entry_points={
        'console_scripts': [
            'ramsey-localization = ramsey_localization.cli:main',
        ],
    },
)

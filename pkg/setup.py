# see https://github.com/karlicoss/pymplate for up-to-date reference
from setuptools import setup, find_namespace_packages # type: ignore


def main() -> None:
    # works with both ordinary and namespace packages
    pkgs = find_namespace_packages('src')
    pkg = min(pkgs)
    setup(
        name=pkg,
        use_scm_version={
            'version_scheme': 'python-simplified-semver',
            'local_scheme': 'dirty-tag',
        },
        setup_requires=['setuptools_scm'],

        # otherwise mypy won't work
        # https://mypy.readthedocs.io/en/stable/installed_packages.html#making-pep-561-compatible-packages
        zip_safe=False,

        packages=pkgs,
        package_dir={'': 'src'},
        # necessary so that package works with mypy
        package_data={pkg: ['py.typed']},

        description='Exact Voronoi cells, covering radii and second moments of lattices, with a verifier for the covering radius bound',

        python_requires='>=3.10',
        install_requires=[
            'appdirs', # for portable user directories detection
            'more_itertools',
            'numpy',   # Monte-Carlo cross-checks
        ],
        extras_require={
            'testing': [
                 'pytest',
                 'pytest-timeout',
                 'hypothesis',

                 'ruff',

                 'mypy',
                 'lxml', # for coverage reports
            ],
            'optional': [
                'logzero', # pretty colored logging
            ],
        },
        entry_points={
            'console_scripts': ['cellmoment=cellmoment.__main__:main'],
        }
    )


if __name__ == "__main__":
    main()

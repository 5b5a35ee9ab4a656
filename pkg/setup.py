from setuptools import setup, find_packages

setup(
    name='coexfair',
    version='1.0.0',
    author='Project Team 1',
    description='Wi-Fi / LTE-LAA coexistence throughput and fairness toolkit',
    include_package_data=True,
    packages=find_packages(exclude=["tests"]),
    python_requires=">=3.10",
    install_requires=[
        "prompt_toolkit",
        "numpy",
        "scipy",
        "numba",
        "pandas",
    ],
    extras_require={
        "test": ["pytest"],
    },
    entry_points={
        'console_scripts': [
            'coexfair=coexfair.cli:main',
        ],
    },
)

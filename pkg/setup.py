import re
from pathlib import Path

from setuptools import find_packages, setup

HERE = Path(__file__).resolve().parent


def get_property(prop):
    result = re.search(
        r'{}\s*=\s*[\'"]([^\'"]*)[\'"]'.format(prop),
        (HERE / "lsa" / "__init__.py").read_text(),
    )
    return result.group(1)


VERSION = get_property("__version__")

with open(str(HERE / "requirements.txt")) as reqs_file:
    reqs = reqs_file.read().splitlines()


setup(
    name="lsa",
    description="Left-symmetric algebras, the S-equation and the phase spaces it builds.",
    version=VERSION,
    license="MIT",
    packages=find_packages(include=["lsa"]),
    package_data={"lsa": ["data/*"]},
    install_requires=reqs,
    extras_require={"test": ["hypothesis>=6.0"]},
    entry_points={"console_scripts": ["lsa=lsa.cli:main"]},
    python_requires=">=3.8",
    classifiers=[
        "Intended Audience :: Science/Research",
        "Intended Audience :: Developers",
        "Natural Language :: English",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Development Status :: 3 - Alpha",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
)

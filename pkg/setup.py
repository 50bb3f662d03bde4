from setuptools import setup, find_packages

setup(
    name="otelbaev-bounds",
    version="1.0.0",
    description="Two-sided spectral bounds for Schrodinger operators with measure potentials via Otelbaev's function",
    author="Otelbaev Bounds Team",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    py_modules=["main"],
    python_requires=">=3.9",
    install_requires=[
        "numpy>=1.24.3",
        "scipy>=1.10.0",
        "pydantic>=2.5.0",
        "PyYAML>=6.0.1",
        "python-dotenv>=1.0.0",
        "rich>=13.7.0",
        "typer>=0.9.0",
        "pytest>=7.4.3",
        "pytest-asyncio>=0.21.1",
    ],
    entry_points={
        "console_scripts": [
            "otelbaev=main:app",
        ],
    },
)

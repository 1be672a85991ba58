#!/usr/bin/env python3
"""
Setup script for the temporal trip-graph engine
"""

import os
import shutil
import subprocess
import sys

def check_python_version():
    """Check if Python version is compatible"""
    if sys.version_info < (3, 10):
        print("Error: Python 3.10 or higher is required")
        sys.exit(1)
    print(f"✓ Python {sys.version_info.major}.{sys.version_info.minor} detected")

def install_requirements():
    """Install required packages"""
    print("Installing requirements...")
    try:
        subprocess.check_call([sys.executable, "-m", "pip", "install", "-r", "requirements.txt"])
        print("✓ Requirements installed successfully")
    except subprocess.CalledProcessError:
        print("Error: Failed to install requirements")
        sys.exit(1)

def setup_environment():
    """Setup environment file"""
    if not os.path.exists('.env'):
        print("Creating .env file...")
        shutil.copyfile('.env.example', '.env')
        print("✓ .env file created")
        print("   Defaults for threads, partitions, digits and windows live there")
    else:
        print("✓ .env file already exists")

def create_data_directory():
    """Create data directory for trip files and graph directories"""
    if not os.path.exists('data'):
        os.makedirs('data')
        print("✓ Data directory created")
    else:
        print("✓ Data directory already exists")

def main():
    """Main setup function"""
    print("Setting up the temporal trip-graph engine...")
    print("=" * 50)

    check_python_version()
    install_requirements()
    setup_environment()
    create_data_directory()

    print("\n" + "=" * 50)
    print("Setup complete! 🎉")
    print("\nNext steps:")
    print("1. Put a yellow-cab trip CSV under data/")
    print("2. Run: python app.py ingest --input data/trips.csv --out data/graph")
    print("3. Run: python app.py routes --graph data/graph --digits 3 --out data/routes.csv")

_SETUPTOOLS_COMMANDS = {"egg_info", "dist_info", "bdist_wheel", "editable_wheel", "sdist",
                        "build", "build_py", "install", "develop"}

if __name__ == "__main__":
    if _SETUPTOOLS_COMMANDS.intersection(sys.argv[1:]):
        # Invoked by a build backend (e.g. pip install -e .): declare package metadata.
        from setuptools import setup

        setup(
            name="trip-graph-engine",
            version="0.1.0",
            python_requires=">=3.10",
            packages=["services", "steps"],
            py_modules=["app", "pipeline"],
            install_requires=["python-dotenv>=1.0.0", "pandas>=2.0.0", "geojson>=3.0.0"],
        )
    else:
        main()

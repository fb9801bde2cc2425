#!/usr/bin/env python3
"""
Setup script for the KGZ Multi-Soliton Toolkit
This script installs the dependencies, runs the fast test suite and a smoke run.
"""

import sys
import subprocess
from pathlib import Path

def run_command(command, description):
    """Run a shell command with error handling."""
    print(f"📋 {description}...")
    try:
        result = subprocess.run(command, shell=True, check=True, capture_output=True, text=True)
        print(f"✅ {description} completed successfully")
        return result.stdout
    except subprocess.CalledProcessError as e:
        print(f"❌ {description} failed: {e}")
        if e.stdout:
            print(f"stdout: {e.stdout}")
        if e.stderr:
            print(f"stderr: {e.stderr}")
        return None

def check_requirements():
    """Check if required files exist."""
    required_files = [
        "requirements.txt",
        "pytest.ini",
        "configs/single_soliton.json",
        "src/cli/app.py",
        "src/evolution/integrator.py",
        "src/construction/harness.py",
    ]

    missing_files = [f for f in required_files if not Path(f).exists()]
    if missing_files:
        print("❌ Missing required files:")
        for file in missing_files:
            print(f"   - {file}")
        return False

    return True

def setup_environment():
    """Check the interpreter and install dependencies."""
    print("🔧 Setting up environment...")

    python_version = sys.version_info
    if python_version < (3, 9):
        print("❌ Python 3.9+ is required")
        return False

    print(f"✅ Python {python_version.major}.{python_version.minor}.{python_version.micro} detected")

    if run_command(f"{sys.executable} -m pip install -r requirements.txt", "Installing Python dependencies"):
        return True
    print("❌ Failed to install dependencies. Try: pip install -r requirements.txt")
    return False

def run_checks():
    """Fast tests, then one soliton profile as a smoke run."""
    print("\n🧪 Running checks...")

    if run_command(f"{sys.executable} -m pytest -q", "Running fast test suite") is None:
        return False

    smoke = f"{sys.executable} -m src.cli soliton configs/single_soliton.json --output output/smoke"
    if run_command(smoke, "Tabulating a single soliton") is None:
        return False

    print("✅ Checks completed successfully!")
    return True

def main():
    """Main setup function."""
    print("🌊 KGZ Multi-Soliton Toolkit - Setup Script")
    print("=" * 50)

    if not Path("README.md").exists() or "KGZ Multi-Soliton Toolkit" not in Path("README.md").read_text():
        print("❌ Please run this script from the project root directory")
        sys.exit(1)

    if not check_requirements():
        print("❌ Setup cannot continue due to missing files")
        sys.exit(1)

    if not setup_environment():
        print("❌ Environment setup failed")
        sys.exit(1)

    if not run_checks():
        print("❌ Checks failed")
        sys.exit(1)

    print("\n" + "=" * 50)
    print("📖 Next: python scripts/run_experiment.py --help")
    print("   Long acceptance runs: python -m pytest -m slow")

if __name__ == "__main__":
    main()

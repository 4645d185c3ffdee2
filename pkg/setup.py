#!/usr/bin/env python3
"""
Setup Script for the Kinetic Benchmark Suite
Creates working directories, an environment file and checks dependencies
"""

import os

ENV_TEMPLATE = """# Directory receiving <name>/ result folders (overrides [output] directory)
LBM_OUTPUT_DIR=results
# DEBUG, INFO, WARNING or ERROR
LBM_LOG_LEVEL=INFO
"""


def create_directory_structure():
    """Create necessary directories"""
    for directory in ['results', 'logs']:
        os.makedirs(directory, exist_ok=True)
        print(f"✅ Created directory: {directory}")


def setup_environment_file():
    """Write a default .env unless one exists"""
    env_file = ".env"
    if os.path.exists(env_file):
        print(f"⚠️  {env_file} already exists, leaving it untouched")
        return
    with open(env_file, "w", encoding='utf-8') as f:
        f.write(ENV_TEMPLATE)
    print(f"✅ Created {env_file}")


def check_dependencies() -> bool:
    """Import each numerical dependency and report what is missing"""
    modules = {
        'numpy': 'numpy',
        'scipy': 'scipy',
        'pandas': 'pandas',
        'python-dotenv': 'dotenv',
    }

    missing = []
    for package, module in modules.items():
        try:
            version = getattr(__import__(module), '__version__', '?')
            print(f"✅ {package} {version}")
        except ImportError:
            missing.append(package)
            print(f"❌ {package} not importable")

    if missing:
        print(f"\n📦 Missing: {', '.join(missing)}")
        print("Install them with: pip install -r requirements.txt")
        return False
    print("\n✅ Numerical stack ready")
    return True


def main():
    """Run the complete setup"""
    print("🚀 Setting up the Kinetic Benchmark Suite...")
    print("=" * 50)

    create_directory_structure()
    setup_environment_file()

    print("\n📋 Checking Dependencies:")
    print("-" * 30)
    check_dependencies()

    print("\n" + "=" * 50)
    print("✅ Setup complete!")
    print("\n📝 Next steps:")
    print("1. Install missing packages: pip install -r requirements.txt")
    print("2. Run a preset: python app.py run config/burgers_table1.ini")
    print("3. Run the tests: python -m unittest discover tests")


if __name__ == "__main__":
    main()

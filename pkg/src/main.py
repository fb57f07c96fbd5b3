"""
Mathieu-Duffing toolkit
Main entry point for the application
"""

import sys
from pathlib import Path

# Add the project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.cli.interface import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())

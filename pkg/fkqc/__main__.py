"""
Entry point for running fkqc as a module.

Allows running with: python -m fkqc
"""

from .cli import main

if __name__ == "__main__":
    main()

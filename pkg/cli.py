# python cli.py table --max-n 19 --samples 1000000 --seed 1
import sys

from backend.app.cli import main

if __name__ == "__main__":
    sys.exit(main())

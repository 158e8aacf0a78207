#!/usr/bin/env python3
"""
Point d'entrée principal de gaussloop.

Ce script lance l'interface en ligne de commande (generate, run, compare,
bench, validate).
"""

import sys
import os

# Ajouter le dossier src au PYTHONPATH
sys.path.insert(0, os.path.join(os.path.dirname(__file__), 'src'))

from gaussloop.cli.main import main

if __name__ == "__main__":
    sys.exit(main())

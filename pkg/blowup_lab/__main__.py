""" just here to run as -m
"""
from .cli import main

main()

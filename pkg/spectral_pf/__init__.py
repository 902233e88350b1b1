"""Density of states, Picard-Fuchs equations and mirror maps of the Harper operator."""

__version__ = "0.1.0"

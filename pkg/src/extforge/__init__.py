"""Ext charts over finite sub-Hopf algebras of the mod-2 Steenrod algebra."""

__version__ = "0.1.0"

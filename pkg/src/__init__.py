"""
KGZ Multi-Soliton Toolkit
Spectral simulation and analysis of multi-solitons for the Klein-Gordon-Zakharov system.
"""

__version__ = "0.1.0"

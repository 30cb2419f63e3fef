"""Neutron-atom scattering verification toolkit."""

__version__ = "0.1.0"

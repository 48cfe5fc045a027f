"""TritForge: mixed qubit/qutrit simulator and Toffoli verification suite."""

__version__ = "0.1.0"

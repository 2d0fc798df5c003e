"""Molecular coefficient dataset generator for H2 in the STO-3G basis.

Produces bond-distance-indexed Pauli coefficients for two qubit encodings
of the same electronic-structure problem: a 4-qubit Jordan-Wigner form
and the 2-qubit form obtained by dropping the two stationary qubits of
the Bravyi-Kitaev form.
"""

__version__ = "0.1.0"

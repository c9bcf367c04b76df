"""quditforge: a symbolic compiler and virtual machine for qudit gates.

Gates are written in QGL, a small matrix-expression DSL. Definitions are
lowered to a complex symbolic IR, differentiated analytically, simplified
with an e-graph, compiled into a tensor-network bytecode, and executed by
a virtual machine (TNVM) that produces a circuit's unitary and gradient
fast enough to sit inside a numerical optimization loop.
"""

from quditforge.errors import QuditforgeError

__all__ = ["QuditforgeError"]
__version__ = "0.1.0"

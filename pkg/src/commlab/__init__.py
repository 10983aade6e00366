"""comm-lab: exact computations with commensurators of solvable
S-arithmetic groups.

Subpackage map:

* ``f2poly``, ``ratfun``, ``matrices``, ``hnf`` -- the exact-arithmetic
  substrate: F2 Laurent polynomials, the field F2(t), rational and
  function-field matrices, and Hermite normal forms over F2[s, 1/s];
* ``lamplighter`` -- the lamplighter group and its commensurations in
  canonical (derivation, equivariant matrix, flip) coordinates;
* ``storus`` -- S-arithmetic ranks of quadratic tori with a p-adic
  square oracle;
* ``unipotent`` -- unitriangular groups: exact log/exp, unique p-th
  roots, S-integrality, Lie-algebra automorphisms;
* ``solvable`` -- Baumslag-Solitar commensurations, the
  inner-derivation solver, and the iterated semidirect-product law;
* ``cli`` -- the ``comm-lab`` command-line interface.
"""

__version__ = "0.1.0"

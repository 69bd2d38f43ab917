"""Quick check that the compiled extension imports and agrees with itself.

    maturin develop -m crates/python/Cargo.toml
    python python/smoke_test.py
"""

import json
import math

import kossak


def main():
    basis = kossak.GeneratorBasis(3)
    assert len(basis.matrices()) == 9
    assert basis.orthonormality_residual() < 1e-12

    v = kossak.v_system_dissipator(1.0, 1.0, 1.0, 1.0)
    lam = kossak.lambda_system_dissipator(1.0, 1.0, 1.0, 1.0)
    assert v.validate()[2]

    a_trace = kossak.kossakowski_trace(v)
    a_pinv = kossak.kossakowski_pinv(v)
    assert a_trace.distance(a_pinv) < 1e-10
    verdict = a_trace.cp_verdict()
    assert verdict.is_cp
    assert abs(verdict.spectrum[0] - 4.0) < 1e-12
    assert kossak.compare_spectra(a_trace, kossak.kossakowski_trace(lam)) < 1e-10

    rates, ops = a_trace.lindblad_form()
    assert sum(r > 1e-9 for r in rates) == 2
    assert len(ops) == 8

    back = kossak.Dissipator.from_json(v.to_json())
    assert back.matrix() == v.matrix()
    assert json.loads(v.to_json())["ordering"] == "block3"

    bad = kossak.KossakowskiMatrix(2, [[1, 0, 0], [0, -0.5, 0], [0, 0, 0]])
    fixed = bad.restore_cp()
    assert math.isclose(bad.distance(fixed), 0.5)

    hamiltonian = kossak.Dissipator(2, [[0, 0, 0, 0], [0, -2j, 0, 0], [0, 0, 2j, 0], [0, 0, 0, 0]])
    try:
        kossak.kossakowski_pinv(hamiltonian)
    except kossak.NotGklsRepresentableError:
        pass
    else:
        raise AssertionError("a commutator is not a dissipator")

    sv = kossak.tensor_singular_values(3)
    assert sum(s < 1e-10 * sv[0] for s in sv) == 8

    print("smoke test passed")


if __name__ == "__main__":
    main()

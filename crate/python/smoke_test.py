"""Smoke test for the pylindblad extension module.

Build and install first:

    pip install maturin
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/pylindblad-*.whl

Then run ``python python/smoke_test.py``.
"""

import numpy as np

import pylindblad as pl


def kron_liouvillian(h, jumps):
    """Column-stacking Liouvillian from Kronecker products."""
    d = h.shape[0]
    eye = np.eye(d)
    m = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for l in jumps:
        ll = l.conj().T @ l
        m += np.kron(l.conj(), l) - 0.5 * np.kron(eye, ll) - 0.5 * np.kron(ll.T, eye)
    return m


def main():
    assert "tfim_boundary_dephasing" in pl.BUILTINS

    gain_loss = pl.Model.builtin("two_level_gain_loss", gamma_g=1, gamma_l=2)
    ss = pl.steady_states(gain_loss)
    assert ss["kernel_dim"] == 1
    assert np.allclose(ss["rho"], np.diag([1 / 3, 2 / 3]), atol=1e-10)

    tfim = pl.Model.builtin("tfim_boundary_dephasing", N=3, h_x=1, gamma=0.5)
    check = pl.check_theorem1(tfim)
    assert check["theorem1_verdict"] == "certified_unique", check
    assert check["closure"]["generated_dim"] == 64

    # The bindings agree with a numpy Liouvillian built independently.
    h, jumps = tfim.hamiltonian(), tfim.jumps()
    rng = np.random.default_rng(0)
    rho = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    expected = (kron_liouvillian(h, jumps) @ rho.reshape(-1, order="F")).reshape(8, 8, order="F")
    assert np.allclose(tfim.apply(rho), expected, atol=1e-12)
    s = np.linalg.svd(kron_liouvillian(h, jumps), compute_uv=False)
    assert np.sum(s <= 1e-9 * s[0]) == 1

    xyz = pl.Model.builtin("xyz_bulk_dephasing", N=3, Jx=1, Jy=0.5, Jz=0.3, hz=0.7, gamma=1)
    report = pl.full_verdict(xyz)
    assert report["theorem1_verdict"] == "not_certified"
    assert report["kernel_dim"] == 2
    assert report["all_consistent"], [c for c in report["consistency"] if not c["passed"]]
    sectors = report["per_sector"][0]["sectors"]
    assert [s["unique"] for s in sectors] == [True, True]

    comm = pl.commutant(xyz)
    assert comm["commutant_dim"] == 2
    label, parity = xyz.symmetries()[0]
    assert label == "parity_z"
    basis = np.stack([b.reshape(-1) for b in comm["basis"]], axis=1)
    coeff, *_ = np.linalg.lstsq(basis, parity.reshape(-1), rcond=None)
    assert np.linalg.norm(basis @ coeff - parity.reshape(-1)) < 1e-8

    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sz = np.diag([1, -1]).astype(complex)
    assert pl.algebra_closure([sx, sz])["generated_dim"] == 4
    assert pl.algebra_closure([sz])["generated_dim"] == 2

    round_trip = pl.Model.from_json(tfim.to_json())
    assert np.allclose(round_trip.hamiltonian(), h)

    try:
        pl.Model.builtin("no_such_model")
    except ValueError as e:
        assert "tfim_boundary_dephasing" in str(e)
    else:
        raise AssertionError("unknown builtin accepted")

    print("pylindblad smoke test passed:", repr(tfim))


if __name__ == "__main__":
    main()

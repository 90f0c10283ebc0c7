#!/usr/bin/env python3
"""Re-check an entlen separability certificate with numpy alone.

    revalidate_certificate.py report_A1_B6_C1.json [--json]

Accepts a bare certificate or a pipeline report with an embedded
"certificate". Exit status 0 if the stored data supports the verdict, 1 if
not, 2 if the file cannot be read.
"""

import argparse
import json
import sys

import numpy as np

FORMAT = "entlen-certificate/1"
DEFAULT_TOL = {"factor_psd": 1e-10, "reconstruction": 1e-9, "negativity_zero": 1e-12}


def matrix(data, side):
    arr = np.asarray(data, dtype=float)
    if arr.shape != (side * side, 2):
        raise ValueError("matrix data has wrong length")
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(side, side)


def permute(m, d, order_from, order_to):
    """Reorders tensor legs of m from site order `order_from` to `order_to`."""
    n = len(order_from)
    if n == 0:
        return m
    perm = [order_from.index(s) for s in order_to]
    t = m.reshape((d,) * (2 * n))
    t = t.transpose(perm + [p + n for p in perm])
    return t.reshape(d**n, d**n)


def embed(m, d, support, target):
    rest = [s for s in target if s not in support]
    full = np.kron(m, np.eye(d ** len(rest)))
    return permute(full, d, list(support) + rest, list(target))


def partial_transpose(m, dims, transposed):
    """Transposes the legs listed in `transposed` (indices into dims)."""
    n = len(dims)
    t = m.reshape(tuple(dims) * 2)
    axes = list(range(2 * n))
    for i in transposed:
        axes[i], axes[i + n] = axes[i + n], axes[i]
    return t.transpose(axes).reshape(m.shape)


def herm(m):
    return (m + m.conj().T) / 2


def min_margin(m):
    ev = np.linalg.eigvalsh(herm(m))
    return ev.min() / max(1.0, np.abs(ev).max())


def negativity(state, dims, transposed):
    tr = np.trace(state).real
    if tr > 0:
        state = state / tr
    ev = np.linalg.eigvalsh(herm(partial_transpose(herm(state), dims, transposed)))
    return float(-ev[ev < 0].sum())


def revalidate(cert):
    if cert.get("format") != FORMAT:
        raise ValueError("unsupported certificate format")
    tol = dict(DEFAULT_TOL)
    tol.update({k: v for k, v in (cert.get("tolerances") or {}).items() if v is not None})
    d = int(cert["local_dim"])
    cut_a, cut_c = list(cert["cut"]["A"]), list(cert["cut"]["C"])
    dim_a, dim_c = int(cert["dim_A"]), int(cert["dim_C"])
    raw = not cut_a and not cut_c
    dim = dim_a * dim_c
    sites = sorted(cut_a + cut_c)
    failures = []

    if cert.get("target") is None:
        return {"ok": False, "failures": ["certificate carries no target operator"]}
    target = matrix(cert["target"]["data"], int(cert["target"]["dim"]))
    if target.shape[0] != dim:
        failures.append("target dimension does not match d_A * d_C")

    assembled = np.zeros((dim, dim), dtype=complex)
    margins = []
    if cert.get("has_decomposition"):
        if cert["identity_coeff"] < 0:
            failures.append("negative identity coefficient")
        for p in cert["products"]:
            if p["weight"] < 0:
                failures.append("negative product weight")
            fa, fc = p["factor_A"], p["factor_C"]
            ma, mc = matrix(fa["data"], fa["dim"]), matrix(fc["data"], fc["dim"])
            margins += [min_margin(ma), min_margin(mc)]
            if not raw:
                prod = np.kron(ma, mc)
                assembled += p["weight"] * embed(prod, d, fa["support"] + fc["support"], sites)
        if len(cert["products"]) > dim * dim:
            failures.append("too many product terms")
        if not raw:
            assembled += cert["identity_coeff"] * np.eye(dim)
    worst_factor = min(margins) if margins else 0.0
    if worst_factor < -tol["factor_psd"]:
        failures.append("a product factor is not PSD")

    ball_margins = []
    for b in cert["ball_blocks"]:
        side = b["dim_A"] * b["dim_C"] if not b["support"] else d ** len(b["support"])
        delta = matrix(b["data"], side)
        norm = np.abs(np.linalg.eigvalsh(herm(delta))).max() if delta.size else 0.0
        ball_margins.append(b["identity_coeff"] / np.sqrt(b["dim_A"] * b["dim_C"]) - norm)
        block = delta + b["identity_coeff"] * np.eye(side)
        if raw:
            if side != dim:
                failures.append("raw ball block dimension does not match the target")
                continue
            assembled += block
        else:
            assembled += embed(block, d, b["support"], sites)
    worst_ball = min(ball_margins) if ball_margins else 0.0

    ref = np.linalg.norm(target)
    rec_err = float(np.linalg.norm(assembled - target) / (ref if ref > 0 else 1.0))

    if raw:
        neg = negativity(target, [dim_a, dim_c], [1])
    else:
        neg = negativity(target, [d] * len(sites), [sites.index(s) for s in cut_c])

    verdict = cert["verdict"]
    if verdict == "SeparableByConstruction":
        if not cert.get("has_decomposition") and not cert["ball_blocks"]:
            failures.append("no separability evidence")
        if worst_ball < 0:
            failures.append("a ball block lies outside its separable ball")
        if rec_err > tol["reconstruction"]:
            failures.append("decomposition does not reproduce target")
        if neg > 100 * tol["negativity_zero"]:
            failures.append("certified state fails PPT")
    elif verdict == "PPTConsistent":
        if neg > tol["negativity_zero"]:
            failures.append("PPTConsistent target has negative partial transpose")
    elif verdict == "Entangled":
        if neg <= tol["negativity_zero"]:
            failures.append("Entangled target passes PPT")
    elif verdict != "Withheld":
        raise ValueError("unknown verdict " + str(verdict))

    return {
        "ok": not failures,
        "verdict": verdict,
        "reconstruction_rel_err": rec_err,
        "worst_factor_margin": float(worst_factor),
        "worst_ball_margin": float(worst_ball),
        "negativity": neg,
        "failures": failures,
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("file")
    ap.add_argument("--json", action="store_true", help="print the result as JSON")
    args = ap.parse_args(argv)
    try:
        with open(args.file) as fh:
            doc = json.load(fh)
        cert = doc["certificate"] if "certificate" in doc else doc
        res = revalidate(cert)
    except (OSError, ValueError, KeyError, TypeError) as e:
        print("error:", e, file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps(res, indent=2))
    else:
        for key in ("verdict", "reconstruction_rel_err", "worst_factor_margin",
                    "worst_ball_margin", "negativity"):
            if key in res:
                print(f"{key}: {res[key]}")
        for f in res["failures"]:
            print("FAIL:", f)
        print("certificate valid" if res["ok"] else "certificate INVALID")
    return 0 if res["ok"] else 1


if __name__ == "__main__":
    sys.exit(main())

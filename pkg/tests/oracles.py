"""Independent re-implementations used as test oracles.

Nothing here calls into the code paths under test beyond the tree structure
itself; formulas are rewritten in the plainest possible form.
"""
import math

import numpy as np

from hiertype.ontology import TypeTree


def random_tree(rng, max_nodes=30, max_depth=4) -> TypeTree:
    """Random tree with at most ``max_nodes`` nodes (ENTITY included)."""
    n = int(rng.integers(2, max_nodes + 1))
    paths = ["/"]
    segs = {"/": ()}
    for i in range(1, n):
        candidates = [p for p in paths if len(segs[p]) < max_depth]
        par = candidates[int(rng.integers(len(candidates)))]
        s = segs[par] + (f"t{i}",)
        p = "/" + "/".join(s)
        paths.append(p)
        segs[p] = s
    return TypeTree.from_paths(paths[1:])


def random_ancestor_closed(tree, rng, n_picks=2):
    labels = set()
    for _ in range(n_picks):
        y = int(rng.integers(1, len(tree)))
        while y > 0:
            labels.add(y)
            y = tree.parent[y]
    return frozenset(labels)


def ancestor_chain_oracle(tree, F):
    out = set()
    for z in range(1, len(tree)):
        ok = True
        a = z
        while a != 0:
            if not F[a] > F[tree.parent[a]]:
                ok = False
            a = tree.parent[a]
        if ok:
            out.add(z)
    return frozenset(out)


def flat_loss_bruteforce(F, Y, xi):
    total = 0.0
    for y in range(len(F)):
        if y not in Y:
            continue
        for yn in range(1, len(F)):
            if yn in Y:
                continue
            total += max(0.0, xi - F[y] + F[yn])
    return total


def hier_loss_bruteforce(tree, F, Y, xi, alpha):
    total = 0.0
    for y in Y:
        par = tree.parent[y]
        m = xi[tree.level[y] - 1]
        total += max(0.0, alpha * m - F[y] + F[par])
        for s in tree.children[par]:
            if s == y or s in Y:
                continue
            total += max(0.0, (1 - alpha) * m - F[par] + F[s])
            total += max(0.0, m - F[y] + F[s])
    return total


def complex_score_oracle(ey, ez, rel):
    h = len(ey) // 2
    total = 0j
    for k in range(h):
        py = complex(ey[k], ey[h + k])
        pz = complex(ez[k], ez[h + k])
        r = complex(rel[k], rel[h + k])
        total += r * py * pz.conjugate()
    return total.real


def rel_loss_bruteforce(tree, Y, E, rel):
    total = 0.0
    for y in Y:
        par = tree.parent[y]
        total += max(0.0, 1 - complex_score_oracle(E[y], E[par], rel))
        negs = {s for s in tree.children[par] if s != y}
        if par != 0:
            gp = tree.parent[par]
            negs |= {s for s in tree.children[gp] if s != par}
        for s in negs:
            total += max(0.0, 1 + complex_score_oracle(E[y], E[s], rel))
    return total


def encode_straightline(T, Q, W, l, r):
    """Mention feature with plain loops, no caching."""
    n, d = W.shape
    m = [-math.inf] * d
    for i in range(l - 1, r):
        for j in range(d):
            v = sum(T[j][b] * W[i][b] for b in range(d))
            m[j] = max(m[j], v)
    logits = []
    for i in range(n):
        logits.append(sum(m[a] * Q[a][b] * W[i][b] for a in range(d) for b in range(d)))
    mx = max(logits)
    ex = [math.exp(s - mx) for s in logits]
    z = sum(ex)
    a = [e / z for e in ex]
    c = [sum(a[i] * W[i][j] for i in range(n)) for j in range(d)]
    return np.array(m + c), np.array(a)


def score_straightline(W1, b1, W2, b2, E, f):
    h1 = [math.tanh(sum(W1[i][j] * f[j] for j in range(len(f))) + b1[i]) for i in range(len(b1))]
    h = [math.tanh(sum(W2[i][j] * h1[j] for j in range(len(h1))) + b2[i]) for i in range(len(b2))]
    return np.array([sum(E[y][k] * h[k] for k in range(len(h))) for y in range(len(E))])


def central_diff(f, arr, step=1e-5):
    out = np.zeros_like(arr)
    it = np.nditer(arr, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        orig = arr[idx]
        arr[idx] = orig + step
        hi = f()
        arr[idx] = orig - step
        lo = f()
        arr[idx] = orig
        out[idx] = (hi - lo) / (2 * step)
    return out


def max_rel_err(a, b, floor=1e-6):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)))

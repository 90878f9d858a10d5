"""Term-system searches on clones, expansion enumeration, and experiments.

Variety-level verdicts are decided on the free algebra of the generated
variety (the 3- or 4-ary clone); absence is conclusive only when clone
generation reached its fixpoint under the cap.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .algebra import App, FiniteAlgebra, Term, Var
from .caps import DEFAULT_CAPS, Caps
from .freeclone import (
    Clone,
    free_relations,
    generate_clone,
    identity_holds,
    slot_identifications,
)
from .identities import (
    BarOp,
    Comp,
    Conv,
    IdentitySpec,
    Inter,
    RConst,
    RVar,
    RelClass,
    Star,
    UnionOp,
    Verdict,
    builtin,
    check_for_all,
    desugar,
    UnsupportedError,
)
from .relations import compose_alt, intersect

_U_CLASSES = (
    RelClass.UAdmissible,
    RelClass.U2Admissible,
    RelClass.UnionOfTwoCongruences,
)


def subst_vars(t: Term, mapping: dict) -> Term:
    """Simultaneously replace variable indices (e.g. j(x,z,z) from j(x,y,z))."""
    if isinstance(t, Var):
        return Var(mapping.get(t.index, t.index))
    return App(t.op, tuple(subst_vars(a, mapping) for a in t.args))


@dataclass
class TermSystem:
    schema: str
    params: dict
    terms: dict  # role name -> Term
    equations: list  # (lhs Term, rhs Term, pattern) triples

    def check(self, alg: FiniteAlgebra) -> bool:
        return all(identity_holds(alg, l, r, p) for l, r, p in self.equations)

    def report_form(self) -> dict:
        return {
            "schema": self.schema,
            "params": {k: list(v) if isinstance(v, tuple) else v for k, v in self.params.items()},
            "terms": {k: str(v) for k, v in self.terms.items()},
            "equations": [
                {"lhs": str(l), "rhs": str(r), "pattern": p} for l, r, p in self.equations
            ],
        }


@dataclass
class SearchResult:
    found: bool
    system: TermSystem | None
    bound: int
    conclusive: bool  # absence is meaningful only when the clone closed
    shortest: int | None = None

    def report_form(self) -> dict:
        return {
            "found": self.found,
            "bound": self.bound,
            "conclusive": self.conclusive,
            "shortest": self.shortest,
            "system": self.system.report_form() if self.system else None,
        }


# ---------------------------------------------------------------------------
# Jonsson ladders


def _flat(n: int, *coords):
    idx = coords[0]
    for c in coords[1:]:
        idx = idx * n + c
    return idx


def _pair_grid(n: int):
    a, b = np.indices((n, n))
    return a.reshape(-1), b.reshape(-1)


def _middle_keys(clone: Clone):
    """Restriction tables (a,b,a), (a,a,c), (a,c,c) for each element."""
    n = clone.algebra.size
    a, b = _pair_grid(n)
    tm = clone.matrix()
    aba = tm[:, _flat(n, a, b, a)]
    aac = tm[:, _flat(n, a, a, b)]
    acc = tm[:, _flat(n, a, b, b)]
    idempotent_mid = np.all(aba == a, axis=1)  # J2 nodes
    return idempotent_mid, aac, acc


def _ladder_system(schema, clone, path, equations, params):
    terms = {f"j{i}": clone.witness(e) for i, e in enumerate(path)}
    return TermSystem(schema, params, terms, equations)


def _jonsson_equations(clone, path, directed: bool):
    eqs = [(clone.witness(path[0]), Var(0), "abc"), (clone.witness(path[-1]), Var(2), "abc")]
    for e in path:
        eqs.append((clone.witness(e), Var(0), "aba"))
    for i in range(len(path) - 1):
        ti, tn = clone.witness(path[i]), clone.witness(path[i + 1])
        if directed:
            # j_i(x,z,z) = j_{i+1}(x,x,z)
            eqs.append((subst_vars(ti, {1: 2}), subst_vars(tn, {1: 0}), "abc"))
        elif i % 2 == 0:
            eqs.append((subst_vars(ti, {1: 0}), subst_vars(tn, {1: 0}), "abc"))
        else:
            eqs.append((subst_vars(ti, {1: 2}), subst_vars(tn, {1: 2}), "abc"))
    return eqs


def _bfs_path(start, is_goal, neighbors):
    """Deterministic shortest path; goal states are only accepted at depth >= 1."""
    parent = {start: None}
    frontier = [start]
    while frontier:
        nxt = []
        for s in frontier:
            for t in neighbors(s):
                if t not in parent:
                    parent[t] = s
                    nxt.append(t)
        for s in nxt:
            if is_goal(s):
                path = [s]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return list(reversed(path))
        frontier = nxt
    return None


def find_jonsson(alg: FiniteAlgebra, max_k: int = 8, caps: Caps = DEFAULT_CAPS) -> SearchResult:
    """Shortest ladder j_0..j_k with j_0=x, j_k=z, j_i(x,y,x)=x and the
    even/odd middle-variable agreements; absence conclusive on a closed clone."""
    clone = generate_clone(alg, 3, caps=caps)
    mid_ok, aac, acc = _middle_keys(clone)
    nodes = [i for i in range(len(clone)) if mid_ok[i]]
    by_aac: dict[bytes, list[int]] = {}
    by_acc: dict[bytes, list[int]] = {}
    for i in nodes:
        by_aac.setdefault(aac[i].tobytes(), []).append(i)
        by_acc.setdefault(acc[i].tobytes(), []).append(i)

    x_id, z_id = 0, 2
    if not (mid_ok[x_id] and mid_ok[z_id]):
        return SearchResult(False, None, max_k, clone.complete)

    def neighbors(state):
        node, parity = state
        # position i even: agree on (a,a,c); odd: agree on (a,c,c)
        bucket = (
            by_aac.get(aac[node].tobytes(), [])
            if parity == 0
            else by_acc.get(acc[node].tobytes(), [])
        )
        return [(v, 1 - parity) for v in bucket]

    spath = _bfs_path((x_id, 0), lambda s: s[0] == z_id, neighbors)
    if spath is None:
        return SearchResult(False, None, max_k, clone.complete)
    path = [s[0] for s in spath]
    k = len(path) - 1
    if k > max_k:
        return SearchResult(False, None, max_k, clone.complete, shortest=k)
    system = _ladder_system(
        "Jonsson", clone, path, _jonsson_equations(clone, path, directed=False), {"k": k}
    )
    return SearchResult(True, system, max_k, clone.complete, shortest=k)


def find_directed_jonsson(
    alg: FiniteAlgebra, max_n: int = 8, caps: Caps = DEFAULT_CAPS
) -> SearchResult:
    """Ladder under j_i(x,z,z) = j_{i+1}(x,x,z) instead of the parity split."""
    clone = generate_clone(alg, 3, caps=caps)
    mid_ok, aac, acc = _middle_keys(clone)
    nodes = [i for i in range(len(clone)) if mid_ok[i]]
    by_aac: dict[bytes, list[int]] = {}
    for i in nodes:
        by_aac.setdefault(aac[i].tobytes(), []).append(i)

    x_id, z_id = 0, 2
    if not (mid_ok[x_id] and mid_ok[z_id]):
        return SearchResult(False, None, max_n, clone.complete)

    def neighbors(node):
        # u steps to v when u's (a,c,c) restriction equals v's (a,a,c) one
        return by_aac.get(acc[node].tobytes(), [])

    path = _bfs_path(x_id, lambda s: s == z_id, neighbors)
    if path is None:
        return SearchResult(False, None, max_n, clone.complete)
    n_steps = len(path) - 1
    if n_steps > max_n:
        return SearchResult(False, None, max_n, clone.complete, shortest=n_steps)
    system = _ladder_system(
        "DirectedJonsson",
        clone,
        path,
        _jonsson_equations(clone, path, directed=True),
        {"n": n_steps},
    )
    return SearchResult(True, system, max_n, clone.complete, shortest=n_steps)


def find_majority(alg: FiniteAlgebra, caps: Caps = DEFAULT_CAPS) -> SearchResult:
    """First clone element with m(x,x,y)=m(x,y,x)=m(y,x,x)=x."""
    clone = generate_clone(alg, 3, caps=caps)
    n = alg.size
    a, b = _pair_grid(n)
    tm = clone.matrix()
    ok = (
        np.all(tm[:, _flat(n, a, a, b)] == a, axis=1)
        & np.all(tm[:, _flat(n, a, b, a)] == a, axis=1)
        & np.all(tm[:, _flat(n, b, a, a)] == a, axis=1)
    )
    hits = np.flatnonzero(ok)
    if len(hits) == 0:
        return SearchResult(False, None, 0, clone.complete)
    m = clone.witness(int(hits[0]))
    system = TermSystem(
        "Majority",
        {},
        {"m": m},
        [(m, Var(0), "aab"), (m, Var(0), "aba"), (m, Var(1), "abb")],
    )
    return SearchResult(True, system, 0, clone.complete)


def find_pixley(alg: FiniteAlgebra, caps: Caps = DEFAULT_CAPS) -> SearchResult:
    """First clone element with p(x,y,y)=x, p(x,y,x)=x, p(x,x,y)=y."""
    clone = generate_clone(alg, 3, caps=caps)
    n = alg.size
    a, b = _pair_grid(n)
    tm = clone.matrix()
    ok = (
        np.all(tm[:, _flat(n, a, b, b)] == a, axis=1)
        & np.all(tm[:, _flat(n, a, b, a)] == a, axis=1)
        & np.all(tm[:, _flat(n, a, a, b)] == b, axis=1)
    )
    hits = np.flatnonzero(ok)
    if len(hits) == 0:
        return SearchResult(False, None, 0, clone.complete)
    p = clone.witness(int(hits[0]))
    system = TermSystem(
        "Pixley",
        {},
        {"p": p},
        [(p, Var(0), "abb"), (p, Var(0), "aba"), (p, Var(1), "aab")],
    )
    return SearchResult(True, system, 0, clone.complete)


# ---------------------------------------------------------------------------
# chain searches in the free algebra (VR and MalF systems)


def _layered_reach(edges_by_pos, start, goal, h):
    """Frontiers under position-dependent edge relations; returns the node
    path of length h or None.  edges_by_pos(i) -> dict node -> sorted targets."""
    layers = [{start: None}]
    for i in range(h):
        eh = edges_by_pos(i)
        cur: dict[int, int] = {}
        for node in sorted(layers[-1]):
            for t in eh.get(node, ()):
                if t not in cur:
                    cur[t] = node
        layers.append(cur)
        if not cur:
            return None
    if goal not in layers[h]:
        return None
    path = [goal]
    for i in range(h, 0, -1):
        path.append(layers[i][path[-1]])
    return list(reversed(path))


def _adjacency(rel):
    out: dict[int, list[int]] = {}
    for a, b in rel.pairs():
        out.setdefault(a, []).append(b)
    for v in out.values():
        v.sort()
    return out


def find_vr(alg: FiniteAlgebra, h: int, caps: Caps = DEFAULT_CAPS) -> SearchResult:
    """Chain x -> z through σ∩τ (even steps) and σ∩υ (odd steps) in the free
    algebra, with 4-ary witnesses read off the clone."""
    if h < 1:
        raise ValueError("h must be >= 1")
    clone3 = generate_clone(alg, 3, caps=caps)
    clone4 = generate_clone(alg, 4, caps=caps)
    conclusive = clone3.complete and clone4.complete
    if not clone3.complete:
        return SearchResult(False, None, h, False)
    fr = free_relations(clone3, caps)
    sigma, tau, ups = fr.r_xz, fr.r_xy, fr.r_yz
    even_adj = _adjacency(intersect(sigma, tau))
    odd_adj = _adjacency(intersect(sigma, ups))

    path = _layered_reach(
        lambda i: even_adj if i % 2 == 0 else odd_adj, fr.x, fr.z, h
    )
    if path is None:
        return SearchResult(False, None, h, conclusive)
    if not clone4.complete:
        return SearchResult(False, None, h, False)

    slots = slot_identifications(clone4, clone3)
    sig_wit: dict[tuple, int] = {}
    tau_wit: dict[tuple, int] = {}
    ups_wit: dict[tuple, int] = {}
    for uid, (ax, ay, az) in enumerate(slots):
        sig_wit.setdefault((ax, az), uid)
        tau_wit.setdefault((ax, ay), uid)
        ups_wit.setdefault((ay, az), uid)

    terms = {}
    equations = [
        (clone3.witness(path[0]), Var(0), "abc"),
        (clone3.witness(path[-1]), Var(2), "abc"),
    ]
    for i, e in enumerate(path):
        terms[f"t{i}"] = clone3.witness(e)
    for i in range(h):
        step = (path[i], path[i + 1])
        u = clone4.witness(sig_wit[step])
        terms[f"u{i}"] = u
        ti, tn = clone3.witness(path[i]), clone3.witness(path[i + 1])
        equations.append((ti, subst_vars(u, {3: 0}), "abc"))
        equations.append((subst_vars(u, {3: 2}), tn, "abc"))
        if i % 2 == 0:
            s = clone4.witness(tau_wit[step])
            equations.append((ti, subst_vars(s, {3: 0}), "abc"))
            equations.append((subst_vars(s, {3: 1}), tn, "abc"))
        else:
            s = clone4.witness(ups_wit[step])
            equations.append((ti, subst_vars(s, {3: 1}), "abc"))
            equations.append((subst_vars(s, {3: 2}), tn, "abc"))
        terms[f"s{i}"] = s
    system = TermSystem("VR", {"h": h}, terms, equations)
    return SearchResult(True, system, h, conclusive, shortest=len(path) - 1)


_W_SLOT = {1: 0, 2: 1}  # w_1 = x, w_2 = y
_WP_SLOT = {1: 1, 2: 2}  # w'_1 = y, w'_2 = z


def find_mal_f(alg: FiniteAlgebra, h: int, caps: Caps = DEFAULT_CAPS) -> SearchResult:
    """Search all f: {0..h-1} -> {1,2} (lexicographic) for 4-ary witnesses
    s_i chaining x to z through α∩R_{f(i)} with the x = s_{i+1}(x,y,x;w'_{f(i)})
    side conditions."""
    if h < 1:
        raise ValueError("h must be >= 1")
    clone3 = generate_clone(alg, 3, caps=caps)
    clone4 = generate_clone(alg, 4, caps=caps)
    conclusive = clone3.complete and clone4.complete
    if not (clone3.complete and clone4.complete):
        return SearchResult(False, None, h, False)
    n = alg.size
    slots = slot_identifications(clone4, clone3)

    # side-condition flags: u(a,b,a,b) = a and u(a,b,a,c) = a
    a, b = _pair_grid(n)
    tm4 = clone4.matrix()
    p_y = np.all(tm4[:, _flat(n, a, b, a, b)] == a, axis=1)
    g = np.indices((n, n, n)).reshape(3, -1)
    p_z = np.all(tm4[:, _flat(n, g[0], g[1], g[0], g[2])] == g[0], axis=1)
    side_ok = {1: p_y, 2: p_z}

    # transitions[v]: start id -> [(element id, end id)] sorted
    transitions: dict[int, dict[int, list]] = {1: {}, 2: {}}
    for uid, ids in enumerate(slots):
        for v in (1, 2):
            key = ids[_W_SLOT[v]]
            transitions[v].setdefault(key, []).append((uid, ids[_WP_SLOT[v]]))

    x_id, z_id = 0, 2
    for f in product((1, 2), repeat=h):
        layers: list[dict[int, tuple]] = [{x_id: None}]
        dead = False
        for i in range(h):
            cur: dict[int, tuple] = {}
            allowed = None if i == 0 else side_ok[f[i - 1]]
            for node in sorted(layers[-1]):
                for uid, end in transitions[f[i]].get(node, ()):
                    if allowed is not None and not allowed[uid]:
                        continue
                    if end not in cur:
                        cur[end] = (node, uid)
            layers.append(cur)
            if not cur:
                dead = True
                break
        if dead or z_id not in layers[h]:
            continue
        # walk back for the witness elements
        chain = []
        node = z_id
        for i in range(h, 0, -1):
            prev, uid = layers[i][node]
            chain.append(uid)
            node = prev
        chain.reverse()
        s_terms = [clone4.witness(u) for u in chain]
        equations = [
            (subst_vars(s_terms[0], {3: _W_SLOT[f[0]]}), Var(0), "abc"),
            (subst_vars(s_terms[-1], {3: _WP_SLOT[f[-1]]}), Var(2), "abc"),
        ]
        for i in range(h - 1):
            equations.append(
                (
                    subst_vars(s_terms[i], {3: _WP_SLOT[f[i]]}),
                    subst_vars(s_terms[i + 1], {3: _W_SLOT[f[i + 1]]}),
                    "abc",
                )
            )
            extra_map = {2: 0, 3: _WP_SLOT[f[i]]}
            equations.append((subst_vars(s_terms[i + 1], extra_map), Var(0), "abc"))
        terms = {f"s{i}": t for i, t in enumerate(s_terms)}
        system = TermSystem("MalF", {"h": h, "f": f}, terms, equations)
        return SearchResult(True, system, h, conclusive)
    return SearchResult(False, None, h, conclusive)


# ---------------------------------------------------------------------------
# dichotomy and experiments


@dataclass
class Dichotomy:
    left: bool  # (x,z) ∈ αβ ∘_k αγ
    right: bool  # (x,z) ∈ αγ ∘_k αβ
    verdict: str  # "Left" | "Right" | "Neither"


def slmore_dichotomy(alg: FiniteAlgebra, k: int, caps: Caps = DEFAULT_CAPS) -> Dichotomy:
    if k < 1:
        raise ValueError("k must be >= 1")
    clone = generate_clone(alg, 3, caps=caps)
    fr = free_relations(clone, caps)
    ab = intersect(fr.alpha, fr.beta)
    ag = intersect(fr.alpha, fr.gamma)
    left = compose_alt(ab, ag, k, "right").contains(fr.x, fr.z)
    right = compose_alt(ag, ab, k, "right").contains(fr.x, fr.z)
    verdict = "Left" if left else ("Right" if right else "Neither")
    return Dichotomy(left, right, verdict)


def variation_count(f) -> int:
    f = tuple(f)
    return sum(1 for i in range(len(f) - 1) if f[i] != f[i + 1])


def mal_implication_experiment(
    alg: FiniteAlgebra, f, f2, caps: Caps = DEFAULT_CAPS, strategy: str = "exhaustive"
) -> dict:
    """Empirical comparison of malA(f) and malA(f2) on one algebra."""
    va = check_for_all(alg, builtin("malA", f=tuple(f)), strategy, caps)
    vb = check_for_all(alg, builtin("malA", f=tuple(f2)), strategy, caps)
    return {
        "f": list(f),
        "f2": list(f2),
        "variations": [variation_count(f), variation_count(f2)],
        "verdicts": [va.holds, vb.holds],
        "observed": {
            "forward": (not va.holds) or bool(vb.holds),
            "backward": (not vb.holds) or bool(va.holds),
        },
        "note": "single-algebra observation, not a variety-level claim",
    }


# ---------------------------------------------------------------------------
# expansions (inclusions over U-variables -> families over plain variables)


@dataclass
class ExpansionSpec:
    source: str
    rhs_choice: dict  # var -> tuple of 1-based occurrence indices
    spec: IdentitySpec

    def report_form(self) -> dict:
        return {
            "source": self.source,
            "rhs_choice": {k: list(v) for k, v in self.rhs_choice.items()},
            "identity": self.spec.describe(),
        }


def _check_expansion_operators(e):
    if isinstance(e, (RVar, RConst)):
        return
    if isinstance(e, Conv):
        _check_expansion_operators(e.arg)
        return
    if isinstance(e, (Inter, Comp)):
        _check_expansion_operators(e.left)
        _check_expansion_operators(e.right)
        return
    if isinstance(e, (Star, UnionOp, BarOp)):
        raise UnsupportedError(
            "expansions are defined for inclusions built from ∩, ∘ and ^⌣ only"
        )
    raise TypeError(f"not a relation expression: {e!r}")


def _count_occurrences(e, names, counts):
    if isinstance(e, RVar):
        if e.name in names:
            counts[e.name] = counts.get(e.name, 0) + 1
    elif isinstance(e, RConst):
        pass
    elif isinstance(e, Conv):
        _count_occurrences(e.arg, names, counts)
    else:
        _count_occurrences(e.left, names, counts)
        _count_occurrences(e.right, names, counts)


def _substitute_occurrences(e, names, pick, counters):
    """Replace the i-th occurrence of each listed variable by pick(var, i)."""
    if isinstance(e, RVar):
        if e.name in names:
            counters[e.name] = counters.get(e.name, 0) + 1
            return RVar(pick(e.name, counters[e.name]))
        return e
    if isinstance(e, RConst):
        return e
    if isinstance(e, Conv):
        return Conv(_substitute_occurrences(e.arg, names, pick, counters))
    return type(e)(
        _substitute_occurrences(e.left, names, pick, counters),
        _substitute_occurrences(e.right, names, pick, counters),
    )


def enumerate_expansions(spec: IdentitySpec) -> list[ExpansionSpec]:
    """All expansions: the left side renames every occurrence of each
    U-variable to a distinct fresh admissible variable; the right side maps
    each occurrence to any variable of the matching group."""
    if spec.mode != "inclusion":
        raise UnsupportedError("expansions are defined for inclusions")
    lhs, rhs = desugar(spec.lhs), desugar(spec.rhs)
    _check_expansion_operators(lhs)
    _check_expansion_operators(rhs)
    classes = dict(spec.variables)
    u_vars = [v for v, c in spec.variables if c in _U_CLASSES]
    lhs_counts: dict[str, int] = {}
    _count_occurrences(lhs, set(u_vars), lhs_counts)
    rhs_counts: dict[str, int] = {}
    _count_occurrences(rhs, set(u_vars), rhs_counts)
    for v in u_vars:
        if lhs_counts.get(v, 0) == 0 and rhs_counts.get(v, 0) > 0:
            raise UnsupportedError(
                f"variable {v} occurs only on the right side; no group to map into"
            )

    new_lhs = _substitute_occurrences(
        lhs, set(u_vars), lambda v, i: f"{v}_{i}", {}
    )
    fresh = [
        (f"{v}_{i}", RelClass.ReflexiveAdmissible)
        for v in u_vars
        for i in range(1, lhs_counts.get(v, 0) + 1)
    ]
    plain = [(v, c) for v, c in spec.variables if c not in _U_CLASSES]
    narrow = {v: c for v, c in spec.narrow.items() if v in dict(plain)}

    choice_space = []
    active = [v for v in u_vars if rhs_counts.get(v, 0) > 0]
    for v in active:
        choice_space.append(
            list(product(range(1, lhs_counts[v] + 1), repeat=rhs_counts[v]))
        )
    out = []
    for combo in product(*choice_space):
        choice = dict(zip(active, combo))
        pick = lambda v, i: f"{v}_{choice[v][i - 1]}"
        new_rhs = _substitute_occurrences(rhs, set(active), pick, {})
        ident = IdentitySpec(
            name=f"{spec.name}.expansion",
            variables=tuple(plain) + tuple(fresh),
            lhs=new_lhs,
            rhs=new_rhs,
            mode="inclusion",
            narrow=narrow,
        )
        out.append(ExpansionSpec(spec.name, choice, ident))
    return out


@dataclass
class ExpansionCheck:
    any_holds: bool | None
    witness: ExpansionSpec | None
    u_verdict: Verdict
    expansion_verdicts: list
    agree: bool | None

    def report_form(self) -> dict:
        return {
            "any_holds": self.any_holds,
            "witness": self.witness.report_form() if self.witness else None,
            "u_verdict": self.u_verdict.report_form(),
            "checked": len(self.expansion_verdicts),
            "agree": self.agree,
        }


def check_any_expansion(
    alg: FiniteAlgebra,
    spec: IdentitySpec,
    caps: Caps = DEFAULT_CAPS,
    strategy: str = "exhaustive",
    narrow: bool = True,
) -> ExpansionCheck:
    """Whether some expansion holds over plain admissible quantification,
    cross-validated against the U-quantified verdict of the source."""
    u_verdict = check_for_all(alg, spec, strategy, caps, narrow=narrow)
    expansions = enumerate_expansions(spec)
    verdicts = []
    witness = None
    any_holds: bool | None = False
    for exp in expansions:
        v = check_for_all(alg, exp.spec, strategy, caps, narrow=narrow)
        verdicts.append(v)
        if v.holds:
            witness = exp
            any_holds = True
            break
        if v.holds is None:
            any_holds = None
    if any_holds is False and any(v.holds is None for v in verdicts):
        any_holds = None
    agree = None
    if u_verdict.holds is not None and any_holds is not None:
        agree = u_verdict.holds == any_holds
    return ExpansionCheck(any_holds, witness, u_verdict, verdicts, agree)

#!/usr/bin/env python3
"""Writes the clausal corpora (bundled/, extra/ and smoke/).

Every family shares its theory symbols across instances, so guidance learned
on one instance carries over to its siblings. Distractor clauses (detours,
cycles, unproductive recursion) make unguided search waste inferences.

    python3 corpus/generate.py        # rewrites all three directories

bundled/ holds the families with shuffled clause order (add, y, z, w, x), so
no listing order favours the useful clause. extra/ holds the remaining
families: trap theories (t, u) on which a linear value model learns to
mis-rank states, and small arithmetic, list and graph problems that list
their productive clauses first.
"""
import os
import random
import sys

ROOT = os.path.dirname(os.path.abspath(__file__))


def num(n, z="0"):
    t = z
    for _ in range(n):
        t = "s(%s)" % t
    return t


def cnf(name, role, *lits):
    return "cnf(%s, %s, %s)." % (name, role, " | ".join(lits))


def problem(comment, axioms, goal, rng=None):
    if rng is not None:
        axioms = list(axioms)
        rng.shuffle(axioms)
    lines = ["% " + comment]
    for i, lits in enumerate(axioms):
        lines.append(cnf("ax%d" % (i + 1), "axiom", *lits))
    lines.append(cnf("goal", "negated_conjecture", *goal))
    return "\n".join(lines) + "\n"


ADD = [
    ["add(0,X,X)"],
    ["~add(X,Y,Z)", "add(s(X),Y,s(Z))"],
]
ADD_NOISE = [
    ["~add(Y,X,Z)", "add(X,Y,Z)"],
    ["~add(s(X),Y,s(Z))", "add(X,Y,Z)"],
    ["~add(X,s(Y),s(Z))", "add(X,Y,Z)"],
]


def add_problem(rng, n, m, noise):
    return problem("addition %d + %d" % (n, m), ADD + ADD_NOISE[:noise], ["~add(%s,%s,%s)" % (num(n), num(m), num(n + m))], rng)


LE = [
    ["le(X,X)"],
    ["~le(X,Y)", "le(X,s(Y))"],
]
LE_NOISE = [
    ["~le(s(X),s(Y))", "le(X,Y)"],
    ["~le(X,Y)", "~le(Y,Z)", "le(X,Z)"],
    ["~le(X,s(s(Y)))", "le(X,Y)"],
]


def le_problem(n, m, noise):
    return problem("order %d <= %d" % (n, m), LE + LE_NOISE[:noise], ["~le(%s,%s)" % (num(n), num(m))])


PARITY = [
    ["even(0)"],
    ["~even(X)", "odd(s(X))"],
    ["~odd(X)", "even(s(X))"],
]
PARITY_NOISE = [
    ["~even(s(s(X)))", "even(X)"],
    ["~odd(s(s(X)))", "odd(X)"],
    ["~even(X)", "even(s(s(X)))"],
]


def parity_problem(n, noise):
    pred = "even" if n % 2 == 0 else "odd"
    return problem("parity of %d" % n, PARITY + PARITY_NOISE[:noise], ["~%s(%s)" % (pred, num(n))])


APP = [
    ["app(nil,L,L)"],
    ["~app(X,Y,Z)", "app(cons(H,X),Y,cons(H,Z))"],
]
APP_NOISE = [
    ["~app(X,nil,X)", "app(X,nil,X)"],
    ["~app(cons(H,X),Y,cons(H,Z))", "app(X,Y,Z)"],
    ["~app(X,Y,Z)", "~app(Z,nil,W)", "app(X,Y,W)"],
]


def lst(items):
    t = "nil"
    for x in reversed(items):
        t = "cons(%s,%s)" % (x, t)
    return t


def app_problem(a, b, noise):
    return problem(
        "append of lengths %d and %d" % (len(a), len(b)),
        APP + APP_NOISE[:noise],
        ["~app(%s,%s,%s)" % (lst(a), lst(b), lst(a + b))],
    )


PATH = [
    ["~edge(X,Y)", "path(X,Y)"],
    ["~edge(X,Y)", "~path(Y,Z)", "path(X,Z)"],
]
PATH_NOISE = [
    ["~path(X,Y)", "~path(Y,Z)", "path(X,Z)"],
    ["~path(Y,X)", "path(X,Y)"],
]


def path_problem(rng, n, extra, noise):
    nodes = ["v%d" % i for i in range(n + 1 + extra)]
    edges = [(nodes[i], nodes[i + 1]) for i in range(n)]
    for _ in range(2 * extra):
        a = rng.randrange(len(nodes))
        b = n + 1 + rng.randrange(extra) if extra else a
        if (nodes[a], nodes[b]) not in edges and a != b:
            edges.append((nodes[a], nodes[b]))
    rng.shuffle(edges)
    axioms = [["edge(%s,%s)" % e] for e in edges] + PATH + PATH_NOISE[:noise]
    return problem("reachability over %d steps, %d side nodes" % (n, extra), axioms, ["~path(v0,v%d)" % n])



def theory_problem(rng, pre, levels, conjuncts, gap, side, traps=True):
    """Level chains pre0 -> pre1 -> ... with a mirrored side chain, trap loops
    through `up(..)` on every predicate, and conjunctive goals."""
    p = lambda i: "%s%d" % (pre, i)
    q = lambda i: "%sside%d" % (pre, i)
    axioms = []
    for i in range(1, levels):
        axioms.append(["~%s(X)" % p(i - 1), "%s(X)" % p(i)])
        if side:
            axioms.append(["~%s(X)" % q(i - 1), "%s(X)" % p(i)])
            axioms.append(["~%s(X)" % q(i - 1), "%s(X)" % q(i)])
            axioms.append(["~%s(X)" % p(i - 1), "~%s(X)" % q(i - 1), "%s(X)" % q(i)])
    for i in range(levels if traps else 0):
        axioms.append(["~%s(up(X))" % p(i), "%s(X)" % p(i)])
        if side:
            axioms.append(["~%s(up(X))" % q(i), "%s(X)" % q(i)])
    goal = []
    for k in range(conjuncts):
        c = "%s_c%d" % (pre, k)
        top = rng.randrange(gap, levels)
        axioms.append(["%s(%s)" % (p(top - gap), c)])
        if side and rng.random() < 0.5:
            axioms.append(["%s(%s)" % (q(rng.randrange(levels)), c)])
        goal.append("~%s(%s)" % (p(top), c))
    rng.shuffle(axioms)
    return problem("%s theory: %d goals, gap %d, side %d" % (pre, conjuncts, gap, side), axioms, goal)



def junk_problem(rng, pre, levels, conjuncts, gap, decoys):
    """Level chains whose real rules need a side fact, next to decoy rules
    that look cheaper but fail on a guard only other constants satisfy."""
    p = lambda i: "%s%d" % (pre, i)
    axioms = []
    consts = ["%s_c%d" % (pre, k) for k in range(conjuncts)]
    others = ["%s_d%d" % (pre, k) for k in range(2)]
    for i in range(1, levels):
        axioms.append(["~%s(X)" % p(i - 1), "~%sside(X)" % pre, "%s(X)" % p(i)])
        decoy = "%sdecoy%d" % (pre, i)
        axioms.append(["~%s(X)" % decoy, "%s(X)" % p(i)])
        axioms.append(["~%s(X)" % p(i - 1), "~%sguard(X)" % pre, "%s(X)" % decoy])
        if decoys > 1:
            axioms.append(["~%s(X)" % p(i - 1), "~%sguard(X)" % pre, "%sb(X)" % decoy])
            axioms.append(["~%sb(X)" % decoy, "%s(X)" % decoy])
    for c in consts:
        axioms.append(["%sside(%s)" % (pre, c)])
    for c in others:
        axioms.append(["%sguard(%s)" % (pre, c)])
        axioms.append(["%sside(%s)" % (pre, c)])
    goal = []
    for c in consts:
        top = rng.randrange(gap, levels)
        axioms.append(["%s(%s)" % (p(top - gap), c)])
        goal.append("~%s(%s)" % (p(top), c))
    rng.shuffle(axioms)
    return problem("%s decoy theory: %d goals, gap %d, %d decoys" % (pre, conjuncts, gap, decoys), axioms, goal)


def families(rng):
    out = []
    for n, m, noise in [(1, 1, 1), (2, 2, 1), (3, 2, 2), (4, 3, 3), (5, 4, 3), (6, 3, 3), (7, 5, 3), (8, 4, 3), (9, 6, 3), (10, 5, 3), (12, 6, 3), (14, 7, 3)]:
        out.append(("add_%d_%d_%d" % (n, m, noise), add_problem(rng, n, m, noise)))
    for n, m, noise in [(0, 2, 1), (1, 5, 2), (3, 8, 3), (2, 10, 3), (4, 12, 3), (0, 14, 3), (5, 16, 3), (3, 18, 3), (6, 20, 3), (2, 24, 3)]:
        out.append(("le_%d_%d_%d" % (n, m, noise), le_problem(n, m, noise)))
    for n, noise in [(3, 1), (5, 2), (7, 3), (9, 3), (11, 3), (13, 3), (15, 3), (17, 3), (20, 3), (24, 3)]:
        out.append(("parity_%d_%d" % (n, noise), parity_problem(n, noise)))
    for la, lb, noise in [(1, 1, 1), (2, 2, 2), (3, 2, 3), (4, 3, 3), (5, 3, 3), (6, 3, 3), (7, 4, 3), (8, 4, 3), (10, 5, 3)]:
        atoms = ["e%d" % i for i in range(la + lb)]
        out.append(("app_%d_%d_%d" % (la, lb, noise), app_problem(atoms[:la], atoms[la:], noise)))
    for n, extra, noise in [(2, 1, 1), (3, 2, 1), (3, 3, 2), (4, 2, 1), (4, 4, 2), (5, 3, 2), (5, 5, 2), (6, 3, 2), (6, 6, 2), (7, 4, 2), (8, 5, 1), (9, 6, 1)]:
        out.append(("path_%d_%d_%d" % (n, extra, noise), path_problem(rng, n, extra, noise)))
    for pre in ["t", "u"]:
        for conj, gap, side in [(1, 1, 0), (1, 2, 1), (2, 2, 0), (2, 2, 1), (2, 3, 1), (3, 2, 1), (3, 3, 1), (2, 4, 1), (3, 4, 1), (4, 3, 1), (4, 4, 1), (3, 5, 1), (4, 5, 1), (5, 4, 1), (5, 5, 1)]:
            out.append(("%s_%d_%d_%d" % (pre, conj, gap, side), theory_problem(rng, pre, 7, conj, gap, side)))
    for pre in ["y", "z"]:
        for conj, gap, side in [(1, 1, 1), (1, 2, 1), (2, 2, 1), (2, 3, 1), (3, 2, 1), (3, 3, 1), (2, 4, 1), (3, 4, 1), (4, 3, 1), (4, 4, 1), (3, 5, 1), (4, 5, 1), (5, 4, 1), (5, 5, 1), (5, 6, 1)]:
            out.append(("%s_%d_%d_%d" % (pre, conj, gap, side), theory_problem(rng, pre, 8, conj, gap, side, traps=False)))
    for pre in ["w", "x"]:
        for conj, gap, decoys in [(1, 2, 1), (1, 3, 1), (1, 4, 2), (2, 3, 1), (2, 4, 1), (1, 6, 2), (2, 5, 2), (3, 4, 1), (3, 5, 2), (2, 7, 2), (4, 4, 2), (3, 6, 2), (4, 6, 2), (3, 8, 2), (4, 8, 2)]:
            out.append(("%s_%d_%d_%d" % (pre, conj, gap, decoys), junk_problem(rng, pre, 10, conj, gap, decoys)))
    return out


BUNDLED = ("add_", "y_", "z_", "w_", "x_")
SMOKE = ["add_1_1_1", "le_0_2_1", "parity_3_1", "app_1_1_1", "path_2_1_1", "add_5_4_3"]


def write(dirname, items):
    d = os.path.join(ROOT, dirname)
    os.makedirs(d, exist_ok=True)
    for f in os.listdir(d):
        if f.endswith(".p"):
            os.remove(os.path.join(d, f))
    for name, text in items:
        with open(os.path.join(d, name + ".p"), "w") as fh:
            fh.write(text)


def main():
    items = families(random.Random(20181203))
    bundled = [it for it in items if it[0].startswith(BUNDLED)]
    extra = [it for it in items if not it[0].startswith(BUNDLED)]
    write("bundled", bundled)
    write("extra", extra)
    by_name = dict(items)
    write("smoke", [(n, by_name[n]) for n in SMOKE])
    print("%d bundled, %d extra, %d smoke" % (len(bundled), len(extra), len(SMOKE)), file=sys.stderr)


if __name__ == "__main__":
    main()

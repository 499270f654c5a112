"""Brute-force reference implementations used only by the tests."""

from collections import Counter, deque
from itertools import permutations


def all_matchings(items):
    """Every perfect matching of ``items`` as a frozenset of 2-element frozensets."""
    items = list(items)
    if not items:
        yield frozenset()
        return
    first, rest = items[0], items[1:]
    for i, partner in enumerate(rest):
        for m in all_matchings(rest[:i] + rest[i + 1 :]):
            yield m | {frozenset((first, partner))}


def canonical_matching(pairs):
    return frozenset(frozenset(map(int, p)) for p in pairs)


def bfs_components(n, edges):
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = True
        q, comp = deque([s]), [s]
        while q:
            u = q.popleft()
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    q.append(w)
                    comp.append(w)
        comps.append(sorted(comp))
    return comps


def brute_path_count(n, edges, ell):
    """Directed paths with ``ell`` distinct edges through ``ell + 1`` distinct vertices."""
    if ell == 0:
        return n
    edges = [tuple(e) for e in edges]
    total = 0
    for seq in permutations(range(len(edges)), ell):
        for start in range(n):
            cur, used, ok = start, {start}, True
            for idx in seq:
                u, v = edges[idx]
                if u == v:
                    ok = False
                    break
                if cur == u:
                    nxt = v
                elif cur == v:
                    nxt = u
                else:
                    ok = False
                    break
                if nxt in used:
                    ok = False
                    break
                used.add(nxt)
                cur = nxt
            total += ok
    return total


def edge_multiset(edges):
    return Counter(tuple(sorted(map(int, e))) for e in edges)

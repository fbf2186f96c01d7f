"""Exploratory: search U/N for canonical {4,4,4} triples satisfying the
chiral intersection condition.  Not part of the package."""
import numpy as np
import time
import sys
from chiral444.words import parse_presentation
from chiral444.coset import enumerate_cosets, EnumerationConfig

U_RELS = ('a^4, b^4, c^4, (a*b)^2, (b*c)^2, (a*b*c)^2, (a^2*b^2)^4, '
          'a^2*c^2*b^2*(a*c)^2, [a,c^-1]*b^2')
extra = sys.argv[1] if len(sys.argv) > 1 else '(a*c^-1)^4, (c^-1*a)^4'
p = parse_presentation(f'gens a,b,c; rels {U_RELS}, {extra};')
tab = enumerate_cosets(p, [], EnumerationConfig(strategy='felsch'))
pa, pb, pc = tab.permutation_rep()
n = tab.degree
print('group order', n)

gens = [pa.images, pb.images, pc.images]
elems = {0: np.arange(n, dtype=np.int32)}
order_ids = [0]
qi = 0
while qi < len(order_ids):
    i = order_ids[qi]
    qi += 1
    for gimg in gens:
        arr = gimg[elems[i]]
        k = int(arr[0])
        if k not in elems:
            elems[k] = arr
            order_ids.append(k)
E = np.empty((n, n), dtype=np.int32)
for k, arr in elems.items():
    E[k] = arr

def mul(i, j):
    return int(E[j][i])

inv = np.empty(n, dtype=np.int32)
for k in range(n):
    inv[k] = int(np.nonzero(E[k] == 0)[0][0])

# element orders via cycle of 0 under right multiplication
order = np.zeros(n, dtype=np.int32)
for k in range(n):
    t, cnt = k, 1
    while t != 0:
        t = mul(t, k)
        cnt += 1
    order[k] = cnt

ord4 = [k for k in range(n) if order[k] == 4]
invol = [k for k in range(n) if order[k] == 2]
print('order-4 elements:', len(ord4), 'involutions:', len(invol))

def subgroup_points(gens_idx):
    """orbit of 0 under right multiplication = subgroup element set"""
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for g in gens_idx:
            y = int(E[g][x])
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen

# conjugacy class representatives of order-4 elements
unseen = set(ord4)
reps = []
while unseen:
    k = min(unseen)
    reps.append(k)
    cls = {mul(mul(inv[g], k), g) for g in range(n)}
    unseen -= cls
print('order-4 classes:', len(reps))

found = []
t0 = time.time()
for s1 in reps:
    s1i = inv[s1]
    for t in invol:
        s2 = mul(s1i, t)
        if order[s2] != 4:
            continue
        s2i = inv[s2]
        for t2 in invol:
            s3 = mul(s2i, t2)
            if order[s3] != 4:
                continue
            # (s1 s2 s3)^2 = (t s3)^2 = 1
            ts3 = mul(t, s3)
            if ts3 != 0 and order[ts3] != 2:
                continue
            # generation
            full = subgroup_points([s1, s2, s3])
            if len(full) != n:
                continue
            # intersection condition
            A1 = subgroup_points([s1])
            A2 = subgroup_points([s2])
            A3 = subgroup_points([s3])
            A12 = subgroup_points([s1, s2])
            A23 = subgroup_points([s2, s3])
            if len(A1 & A23) != 1 or len(A12 & A3) != 1:
                continue
            if A12 & A23 != A2:
                continue
            found.append((s1, s2, s3, len(A12), len(A23)))
            if len(found) <= 5:
                print('FOUND triple', (s1, s2, s3), '|<s1,s2>|=', len(A12),
                      '|<s2,s3>|=', len(A23), f'({time.time()-t0:.0f}s)')
print('total canonical triples found (up to s1-class):', len(found),
      f'in {time.time()-t0:.0f}s')
if found:
    from collections import Counter
    print('subgroup order profiles:', Counter((f[3], f[4]) for f in found))

#!/usr/bin/env python3
"""Regenerates the .gl benchmark files in corpus/ at all problem sizes."""

import os
import sys

OUT = os.path.join(os.path.dirname(__file__), "..", "corpus")


def names(prefix, n):
    return [f"{prefix}{i + 1}" for i in range(n)]


def one_of(var, objs):
    if len(objs) == 1:
        return f"(= {var} {objs[0]})"
    return "(or " + " ".join(f"(= {var} {o})" for o in objs) + ")"


def dishwasher(rooms, dishes, negative=False):
    ds = names("d", dishes)
    rs = names("r", rooms)
    dset = " ".join(ds)
    rset = " ".join(rs)

    unload_phase = f"""      (while (exists x (onRobot x))
        (pick x ({dset}) (pact (unload x))))
"""
    collect = f"""(pick y ({rset}) (seq
        (pact (goto y))
        (while (exists x (dirtyDish x y))
          (pick x ({dset}) (pact (load x y))))
        (pact (goto kitchen))))"""
    supply = f"(loop (pick x ({dset}) (pick y ({rset}) (pact (addDish x y)))))"

    if negative:
        # the robot can never unload, and one dirty dish is guaranteed before
        # it gets to act
        program = f"""(program
  (seq
    (pact (addDish d1 r1))
    (conc
      (loop (seq
        {collect}))
      {supply})))"""
        spec = ("(spec (finally (globally (and"
                " (not (exists x (exists y (dirtyDish x y))))"
                " (not (exists x (onRobot x)))))))")
    else:
        program = f"""(program
  (conc
    (loop (seq
{unload_phase}      {collect}))
    {supply}))"""
        spec = "(spec (finally (globally (not (exists x (exists y (dirtyDish x y)))))))"

    return f"""golog-synth v1
; dishwasher robot, {rooms} room(s), {dishes} dish(es){", unrealizable variant" if negative else ""}

(objects {dset} {rset} kitchen)
(fluents (dish 1) (room 1) (at 1) (new 1) (onRobot 1) (dirtyDish 2))

(init
  (forall x (iff (dish x) {one_of("x", ds)}))
  (forall x (iff (room x) {one_of("x", rs)}))
  (forall x (iff (at x) (= x kitchen)))
  (forall x (iff (new x) (dish x)))
  (forall x (forall y (not (dirtyDish x y))))
  (forall x (not (onRobot x))))

(poss (load x y) (and (dirtyDish x y) (at y)))
(poss (unload x) (and (onRobot x) (at kitchen)))
(poss (addDish x y) (and (new x) (room y)))
(poss (goto x) (or (room x) (= x kitchen)))

(ssa (dirtyDish x y)
  (pos (addDish u v) (and (= x u) (= y v)))
  (neg (load u v) (and (= x u) (= y v))))
(ssa (onRobot x)
  (pos (load u v) (= x u))
  (neg (unload u) (= x u)))
(ssa (new x)
  (neg (addDish u v) (= x u)))
(ssa (at x)
  (pos (goto u) (= x u))
  (neg (goto u) true))

(env addDish)

{program}

{spec}
"""


def warehouse(boxes):
    bs = names("b", boxes)
    bset = " ".join(bs)
    return f"""golog-synth v1
; warehouse robot, {boxes} box(es); box contents and bubble wrap are only
; partially known, and the environment may drop a held box

(objects s1 s2 {bset})
(fluents (shelf 1) (box 1) (wrap 1) (fragile 1)
         (rAt 1) (at 2) (holding 1) (broken 1) (in 2))

(init
  (forall x (iff (shelf x) (or (= x s1) (= x s2))))
  (forall x (iff (box x) {one_of("x", bs)}))
  (forall x (implies (exists y (in x y)) (and (not (shelf x)) (not (box x)))))
  (exists x (wrap x))
  (forall x (and (not (broken x)) (not (holding x))))
  (rAt s1)
  (forall x (implies (box x) (at x s1)))
  (forall x (forall y (implies (and (in x y) (box y)) (at x s1))))
  (forall y (implies (not (= y s1)) (and (not (rAt y)) (forall x (not (at x y))))))
  (forall x (forall y (implies (in x y) (not (wrap x))))))

(poss (take x y) (and (at x y) (rAt y)))
(poss (move x y) (and (rAt x) (shelf y) (not (= x y))))
(poss (put x y) (and (holding x) (rAt y)))
(poss (addWrap x) (exists y (and (rAt y) (at x y))))
(poss (drop x) (holding x))

(ssa (rAt x)
  (pos (move u v) (= x v))
  (neg (move u v) (= x u)))
(ssa (at x y)
  (pos (move p q) (and (= y q) (exists v (and (holding v) (or (= v x) (in x v))))))
  (neg (move p q) (and (= y p) (exists v (and (holding v) (or (= v x) (in x v)))))))
(ssa (holding x)
  (pos (take u v) (= x u))
  (neg (put u v) (= x u)))
(ssa (broken x)
  (pos (drop u) (and (in x u) (fragile x) (not (exists z (and (in z u) (wrap z)))))))
(ssa (in x y)
  (pos (addWrap u) (and (= y u) (wrap x))))

(env drop)

(program
  (loop (seq
    (opt (pact (move s2 s1)))
    (pick b ({bset}) (seq
      (opt (pact (addWrap b)))
      (pact (take b s1))
      (opt (pact (drop b)))
      (pick l (s1 s2) (seq
        (pact (move s1 l))
        (pact (put b l)))))))))

(spec (finally (forall o (implies (in o b1) (and (not (broken o)) (at o s2))))))
"""


def main():
    os.makedirs(OUT, exist_ok=True)
    files = {}
    for r in (1, 2):
        for d in (1, 2, 3):
            files[f"dishwasher_r{r}_d{d}.gl"] = dishwasher(r, d)
    files["dishwasher_unrealizable.gl"] = dishwasher(1, 1, negative=True)
    for b in (1, 2):
        files[f"warehouse_b{b}.gl"] = warehouse(b)
    for name, text in sorted(files.items()):
        path = os.path.join(OUT, name)
        with open(path, "w") as f:
            f.write(text)
        print(name)
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Convention tables fixed by the example-driven fitter.

The Gauss-code layer cannot see classical planar pictures, so the geometric
conventions — which writhe pattern belongs to which local triple-move type,
and which side of each discriminant stratum is the positive one — live here
as plain data.  A few entries are anchored directly by defining examples
(they are marked below); the remaining ones are determined by requiring the
equation suites and the worked examples to hold.  ``fitting.py`` regenerates
this module; edit the fitter, not this file.
"""

# Local type (1..8) of a triple move, keyed by the writhe triple
# (w(d), w(hm), w(ml)), where d is the crossing of the highest and lowest
# branches, hm of the highest and middle, ml of the middle and lowest.
# (1,1,1) -> 1 is anchored by the positive braid-relation move.
LOCAL_TYPE_BY_WRITHES = {
    (1, 1, 1): 1,
    (1, -1, -1): 2,
    (-1, 1, -1): 3,
    (-1, -1, 1): 4,
    (1, 1, -1): 5,
    (-1, 1, 1): 6,
    (1, -1, 1): 7,
    (-1, -1, -1): 8,
}

# Planar layout of the triple-move disk, keyed by local type: the entries
# (a, b, c) are the bottom-edge positions at which the (lowest, middle,
# highest) branch sits, and the kind says whether all three branches run
# upward through the disk ("braid") or the middle branch runs downward,
# entering on the top edge ("star").  The table is tied to
# LOCAL_TYPE_BY_WRITHES by the planar sign rules: for two upward strands
# the crossing is positive exactly when the strand from the lower left
# passes under; an up/down pair is positive exactly when the up strand
# passes over (left position) resp. under (right position).  Types 2 and 6
# are the two writhe triples no all-upward layout realizes.
SLOT_BY_LOCAL_TYPE = {
    1: ((1, 2, 3), "braid"),
    2: ((1, 2, 3), "star"),
    3: ((3, 1, 2), "braid"),
    4: ((2, 3, 1), "braid"),
    5: ((2, 1, 3), "braid"),
    6: ((3, 2, 1), "star"),
    7: ((1, 3, 2), "braid"),
    8: ((3, 2, 1), "braid"),
}

# Positive-side orientation of the triple-move stratum per local type: the
# sign of a triple move is side * RIII_COORIENTATION[local type], where side
# is +1 exactly when the after frame reads (u_d, u_ml) along the lowest
# branch.  Type 1 is anchored: the positive braid-relation move has sign +1.
RIII_COORIENTATION = {1: 1, 2: 1, 3: 1, 4: 1, 5: 1, 6: 1, 7: 1, 8: 1}

# Marked-point placement (global type) of a triple move, keyed by the triple
# (type(d), type(hm), type(ml)).  The patterns (0,1,1) and (1,0,0) cannot
# occur.  Reversing the circle orientation toggles every crossing type, so
# this table forces the involution ra<->la, rb<->lc, rc<->lb.
GLOBAL_TYPE_BY_SIGNATURE = {
    (0, 1, 0): "ra",
    (0, 0, 1): "rb",
    (1, 1, 1): "rc",
    (1, 0, 1): "la",
    (0, 0, 0): "lb",
    (1, 1, 0): "lc",
}

# Tangency type superscript by the tangent direction of the two branches.
RII_SUPERSCRIPT = {"equal": "-", "opposite": "+"}

# Sign of a tangency-creating move, keyed by tangency type; deletion negates.
RII_CREATE_SIGN = {"II+0": 1, "II-0": 1, "II+1": 1, "II-1": 1}

# Sign of a curl-creating move, keyed by (curl writhe, curl type); deletion
# negates.
RI_CREATE_SIGN = {(1, 0): 1, (1, 1): 1, (-1, 0): 1, (-1, 1): 1}

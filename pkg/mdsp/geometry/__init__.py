from mdsp.geometry.blocks import Ball, Box, FeasibleBlock, ProductSet, Simplex, two_player_set
from mdsp.geometry.dgf import DISTANCE_GENERATING_FUNCTIONS, EuclideanDGF, NegativeEntropyDGF
from mdsp.geometry.geometry import Geometry, bregman, grad_dgf, mirror, prox

"""Games with imperfect information on graphs of bounded width."""
from .game_model import ImperfectGame, WinningCondition, parse_game, serialize_game, validate
from .graph_core import DiGraph, InvalidInput, parse_digraph, serialize_digraph
from .parity_solver import solve, solve_parity
from .powerset import powerset_construct
from .search_games import dag_width, directed_path_width, entanglement, nmdw, tree_width
from .simulated import simulate_solve

__version__ = "0.1.0"

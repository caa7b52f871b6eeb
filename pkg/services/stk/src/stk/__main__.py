from .stk_cli import run

run()

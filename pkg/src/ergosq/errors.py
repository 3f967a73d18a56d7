class ContractError(ValueError):
    """An input or intermediate result violated an operation's contract."""

"""Exceptions shared across modules."""


class BudgetExceeded(Exception):
    """An enumeration would exceed its configured work budget."""

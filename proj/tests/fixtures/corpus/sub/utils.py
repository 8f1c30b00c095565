def helper(counter):
    return len(counter)

